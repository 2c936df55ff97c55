//! Building a batch run in code: text round trip and an in-process Bernoulli table.
//! Usage: `cargo run --example run_config`

use safe_fem::cli::{bernoulli_table_csv, Command, RunConfig};

fn main() -> safe_fem::Result<()> {
    let cfg = RunConfig {
        command: Command::BernoulliTable,
        epsilons: vec![0.0, 1e-8],
        arg_min: -2.0,
        arg_max: 2.0,
        samples: 3,
        ..Default::default()
    };
    let text = cfg.to_text();
    print!("{text}");
    assert_eq!(RunConfig::from_text(&text)?, cfg);
    let csv = bernoulli_table_csv(&cfg)?;
    for line in csv.lines().take(8) {
        println!("{line}");
    }
    println!("... {} rows", csv.lines().count() - 1);
    Ok(())
}
