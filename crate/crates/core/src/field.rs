//! Pointwise-evaluable coefficient and solution fields.
//!
//! Scalar proxies (0-forms and top forms) and vector proxies (edge and face
//! forms) share one value type: a [`Proxy`] is a 3-vector, and scalars
//! occupy its first component with the others zero. In 2D vectors have a
//! zero third component.

use std::sync::Arc;

use nalgebra::Vector3;

use crate::mesh::Point;

pub type Proxy = Vector3<f64>;

pub type ScalarFn = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(&Point) -> Vector3<f64> + Send + Sync>;

#[derive(Clone)]
pub enum Field {
    Scalar(ScalarFn),
    Vector(VectorFn),
}

impl Field {
    pub fn scalar<F>(f: F) -> Self
    where
        F: Fn(&Point) -> f64 + Send + Sync + 'static,
    {
        Self::Scalar(Arc::new(f))
    }

    pub fn vector<F>(f: F) -> Self
    where
        F: Fn(&Point) -> Vector3<f64> + Send + Sync + 'static,
    {
        Self::Vector(Arc::new(f))
    }

    pub fn constant_scalar(c: f64) -> Self {
        Self::scalar(move |_| c)
    }

    pub fn constant_vector(c: Vector3<f64>) -> Self {
        Self::vector(move |_| c)
    }

    pub fn zero(vector: bool) -> Self {
        if vector {
            Self::constant_vector(Vector3::zeros())
        } else {
            Self::constant_scalar(0.0)
        }
    }

    pub fn is_vector(&self) -> bool {
        matches!(self, Self::Vector(_))
    }

    pub fn eval(&self, x: &Point) -> Proxy {
        match self {
            Self::Scalar(f) => Vector3::new(f(x), 0.0, 0.0),
            Self::Vector(f) => f(x),
        }
    }
}

impl std::fmt::Debug for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Scalar(_) => f.write_str("Field::Scalar(..)"),
            Self::Vector(_) => f.write_str("Field::Vector(..)"),
        }
    }
}

pub fn scalar_fn<F>(f: F) -> ScalarFn
where
    F: Fn(&Point) -> f64 + Send + Sync + 'static,
{
    Arc::new(f)
}

pub fn vector_fn<F>(f: F) -> VectorFn
where
    F: Fn(&Point) -> Vector3<f64> + Send + Sync + 'static,
{
    Arc::new(f)
}
