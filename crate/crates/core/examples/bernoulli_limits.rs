//! Bernoulli kernels approaching their vanishing-diffusion limits.
//! Usage: `cargo run --example bernoulli_limits`

use safe_fem::exponential::{bernoulli, bernoulli_limit};

fn main() -> safe_fem::Result<()> {
    let samples: [&[f64]; 6] = [&[-2.0], &[1.5], &[3.0, 1.0], &[-1.0, -4.0], &[2.0, 1.0, -1.0], &[-1.0, -2.0, -3.0]];
    print!("{:<18}", "args");
    let eps = [1.0, 1e-1, 1e-2, 1e-4, 1e-8, 0.0];
    for e in eps {
        print!("{:>14}", format!("eps={e:e}"));
    }
    println!();
    for args in samples {
        print!("{:<18}", format!("{args:?}"));
        for e in eps {
            print!("{:>14.8}", bernoulli(e, args)?);
        }
        println!();
        assert_eq!(bernoulli(0.0, args)?, bernoulli_limit(args));
    }
    // large |s| / eps stays finite
    println!("B1^1e-300(1) = {:e}, B2^1e-12(5, -5) = {:e}", bernoulli(1e-300, &[1.0])?, bernoulli(1e-12, &[5.0, -5.0])?);
    Ok(())
}
