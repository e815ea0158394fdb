//! Generalized cylindrical coordinates `(r, theta_1, .., theta_{b-1}, z)` on
//! `R^b x R` and their Cartesian counterparts `(x_1, .., x_b, z)`.
//!
//! `x_1 = r cos t1`, `x_2 = r sin t1 cos t2`, ..,
//! `x_b = r sin t1 .. sin t_{b-1}`.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Dual {
    pub v: f64,
    pub d: f64,
}

impl Dual {
    fn constant(v: f64) -> Self {
        Self { v, d: 0.0 }
    }
    fn var(v: f64) -> Self {
        Self { v, d: 1.0 }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual {
            v: self.v + o.v,
            d: self.d + o.d,
        }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual {
            v: self.v - o.v,
            d: self.d - o.d,
        }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual {
            v: self.v * o.v,
            d: self.d * o.v + self.v * o.d,
        }
    }
}

pub(crate) trait Trig: Copy + Add<Output = Self> + Mul<Output = Self> {
    fn sin(self) -> Self;
    fn cos(self) -> Self;
}

impl Trig for f64 {
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
}

impl Trig for Dual {
    fn sin(self) -> Self {
        Dual {
            v: self.v.sin(),
            d: self.d * self.v.cos(),
        }
    }
    fn cos(self) -> Self {
        Dual {
            v: self.v.cos(),
            d: -self.d * self.v.sin(),
        }
    }
}

fn polar_map<T: Trig>(b: usize, p: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(b + 1);
    let mut radial = p[0];
    for i in 0..b - 1 {
        let a = p[1 + i];
        out.push(radial * a.cos());
        radial = radial * a.sin();
    }
    out.push(radial);
    out.push(p[b]);
    out
}

pub fn polar_to_cartesian(b: usize, p: &[f64]) -> Vec<f64> {
    polar_map(b, p)
}

pub fn cartesian_to_polar(b: usize, x: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(b + 1);
    let r = x[..b].iter().map(|c| c * c).sum::<f64>().sqrt();
    out.push(r);
    for i in 0..b.saturating_sub(2) {
        let tail = x[i + 1..b].iter().map(|c| c * c).sum::<f64>().sqrt();
        out.push(tail.atan2(x[i]));
    }
    if b >= 2 {
        out.push(x[b - 1].atan2(x[b - 2]));
    }
    out.push(x[b]);
    out
}

/// `d(cartesian) / d(polar)` at polar point `p`.
pub fn polar_jacobian(b: usize, p: &[f64]) -> DMatrix<f64> {
    let d = b + 1;
    let mut jac = DMatrix::zeros(d, d);
    for col in 0..d {
        let seeded: Vec<Dual> = p
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if i == col {
                    Dual::var(v)
                } else {
                    Dual::constant(v)
                }
            })
            .collect();
        for (row, val) in polar_map(b, &seeded).into_iter().enumerate() {
            jac[(row, col)] = val.d;
        }
    }
    jac
}

pub fn polar_vector_to_cartesian(b: usize, p: &[f64], v: &[f64]) -> Vec<f64> {
    let jac = polar_jacobian(b, p);
    (0..b + 1)
        .map(|i| (0..b + 1).map(|j| jac[(i, j)] * v[j]).sum())
        .collect()
}

pub fn cartesian_vector_to_polar(b: usize, p: &[f64], v: &[f64]) -> Option<Vec<f64>> {
    let jac = polar_jacobian(b, p);
    let rhs = nalgebra::DVector::from_column_slice(v);
    jac.lu().solve(&rhs).map(|s| s.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_jacobian() {
        for b in [2usize, 3, 4] {
            let mut p = vec![1.3];
            for i in 0..b - 1 {
                p.push(0.4 + 0.3 * i as f64);
            }
            p.push(-0.7);
            let x = polar_to_cartesian(b, &p);
            let back = cartesian_to_polar(b, &x);
            for (a, c) in p.iter().zip(back.iter()) {
                assert!((a - c).abs() < 1e-13);
            }
            let jac = polar_jacobian(b, &p);
            let h = 1e-6;
            for col in 0..=b {
                let mut pp = p.clone();
                let mut pm = p.clone();
                pp[col] += h;
                pm[col] -= h;
                let (xp, xm) = (polar_to_cartesian(b, &pp), polar_to_cartesian(b, &pm));
                for row in 0..=b {
                    let fd = (xp[row] - xm[row]) / (2.0 * h);
                    assert!((jac[(row, col)] - fd).abs() < 1e-8);
                }
            }
        }
    }
}
