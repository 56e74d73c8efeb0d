//! Separable Lagrange interpolation on the periodic grid.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// A one-dimensional interpolation stencil applied along each axis.
pub trait Interpolator: Send + Sync {
    fn name(&self) -> &'static str;

    /// Number of nodes per axis in the stencil.
    fn support(&self) -> usize;

    /// Offset of the first stencil node relative to the cell's lower node.
    fn first_offset(&self) -> isize {
        1 - (self.support() / 2) as isize
    }

    /// Weights for a point at fraction `frac ∈ [0, 1)` of the cell.
    fn weights(&self, frac: f64, out: &mut [f64]);
}

/// Lagrange polynomial through `points` equispaced nodes centred on the cell.
#[derive(Clone, Copy, Debug)]
pub struct Lagrange {
    points: usize,
    name: &'static str,
}

impl Lagrange {
    pub const TRICUBIC: Lagrange = Lagrange {
        points: 4,
        name: "tricubic",
    };
    pub const QUINTIC: Lagrange = Lagrange {
        points: 6,
        name: "quintic",
    };
}

impl Interpolator for Lagrange {
    fn name(&self) -> &'static str {
        self.name
    }

    fn support(&self) -> usize {
        self.points
    }

    fn weights(&self, frac: f64, out: &mut [f64]) {
        let first = self.first_offset() as f64;
        for (j, w) in out.iter_mut().enumerate().take(self.points) {
            let oj = first + j as f64;
            let mut p = 1.0;
            for m in 0..self.points {
                if m != j {
                    let om = first + m as f64;
                    p *= (frac - om) / (oj - om);
                }
            }
            *w = p;
        }
    }
}

type Factory = fn() -> Box<dyn Interpolator>;

pub const DEFAULT_KERNEL: &str = "tricubic";

/// Name → interpolation kernel.
pub struct InterpolatorRegistry {
    factories: BTreeMap<String, Factory>,
}

impl InterpolatorRegistry {
    pub fn with_builtins() -> Self {
        let mut r = InterpolatorRegistry {
            factories: BTreeMap::new(),
        };
        r.register("tricubic", || Box::new(Lagrange::TRICUBIC));
        r.register("quintic", || Box::new(Lagrange::QUINTIC));
        r
    }

    pub fn register(&mut self, name: &str, factory: Factory) {
        self.factories.insert(name.to_string(), factory);
    }

    pub fn create(&self, name: &str) -> Result<Box<dyn Interpolator>> {
        self.factories
            .get(name)
            .map(|f| f())
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "interpolation kernel",
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<String> {
        self.factories.keys().cloned().collect()
    }
}

impl Default for InterpolatorRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_reproduce_polynomials() {
        for k in [Lagrange::TRICUBIC, Lagrange::QUINTIC] {
            let s = k.support();
            let mut w = vec![0.0; s];
            for frac in [0.0, 0.3, 0.77] {
                k.weights(frac, &mut w);
                for deg in 0..s {
                    let exact = frac.powi(deg as i32);
                    let approx: f64 = (0..s)
                        .map(|j| w[j] * (k.first_offset() as f64 + j as f64).powi(deg as i32))
                        .sum();
                    assert!((exact - approx).abs() < 1e-12, "{} deg {deg}", k.name());
                }
            }
        }
    }

    #[test]
    fn registry_lookup() {
        let r = InterpolatorRegistry::with_builtins();
        assert_eq!(r.create("quintic").unwrap().support(), 6);
        assert!(r.create("spline").is_err());
    }
}
