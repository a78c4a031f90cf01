use std::cmp::Ordering;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::upoly::UPoly;
use crate::error::{Error, Result};
use crate::numeric::ln_interval_int;

const MAX_ITER: usize = 2000;

/// A disk guaranteed to contain a root, under the standard floating-point rounding model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootDisk {
    pub re: f64,
    pub im: f64,
    pub radius: f64,
}

impl RootDisk {
    pub fn center(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (self.center() - z).norm() <= self.radius
    }

    pub fn disjoint(&self, o: &RootDisk) -> bool {
        (self.center() - o.center()).norm() > self.radius + o.radius
    }
}

/// All complex roots of a squarefree polynomial, in the canonical order
/// (real part, then imaginary part).
///
/// Each disk has radius `n·(|p(z)| + e)/(|p'(z)| − e')`, which contains a
/// root; pairwise disjointness then pins exactly one root per disk.
pub fn complex_roots(p: &UPoly) -> Result<Vec<RootDisk>> {
    let deg = p
        .degree()
        .ok_or_else(|| Error::Precondition("zero polynomial has no roots".into()))?;
    let zeros = p.ascending().iter().take_while(|c| c.is_zero()).count();
    let mut out = vec![
        RootDisk {
            re: 0.0,
            im: 0.0,
            radius: 0.0
        };
        zeros
    ];
    let core = p.ascending()[zeros..].to_vec();
    let coeffs = UPoly::from_ascending(core).to_f64s()?;
    let n = deg - zeros;
    if n > 0 {
        let z = aberth(&coeffs, n);
        let dcoef = UPoly::derivative_f64(&coeffs);
        for zk in z {
            let (v, e) = UPoly::eval_complex(&coeffs, zk);
            let (dv, de) = UPoly::eval_complex(&dcoef, zk);
            let denom = dv.norm() - de;
            if denom <= 0.0 {
                return Err(Error::Numerical(
                    "derivative vanishes near a root; polynomial not squarefree?".into(),
                ));
            }
            let radius = n as f64 * (v.norm() + e) / denom;
            out.push(RootDisk {
                re: zk.re,
                im: zk.im,
                radius: radius * (1.0 + 4.0 * f64::EPSILON),
            });
        }
    }
    for i in 0..out.len() {
        for j in i + 1..out.len() {
            if !out[i].disjoint(&out[j]) {
                return Err(Error::Numerical("root disks overlap; roots not separated".into()));
            }
        }
    }
    snap(&mut out);
    out.sort_by(canonical_order);
    Ok(out)
}

fn aberth(coeffs: &[f64], n: usize) -> Vec<Complex64> {
    let lead = coeffs[n].abs();
    let r = (coeffs[0].abs() / lead).powf(1.0 / n as f64).max(f64::MIN_POSITIVE);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(r, 2.0 * PI * k as f64 / n as f64 + 0.4))
        .collect();
    let dcoef = UPoly::derivative_f64(coeffs);
    for _ in 0..MAX_ITER {
        let mut moved = 0.0f64;
        for k in 0..n {
            let (v, _) = UPoly::eval_complex(coeffs, z[k]);
            if v == Complex64::zero() {
                continue;
            }
            let (dv, _) = UPoly::eval_complex(&dcoef, z[k]);
            let w = v / dv;
            let s: Complex64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let step = w / (Complex64::new(1.0, 0.0) - w * s);
            if step.is_finite() {
                z[k] -= step;
                moved = moved.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if moved < 1e-17 {
            break;
        }
    }
    z
}

/// Real polynomials have conjugate-symmetric roots: disks meeting the real
/// axis are treated as real, and conjugate partners share one real part.
pub(crate) fn snap(d: &mut [RootDisk]) {
    for r in d.iter_mut() {
        if r.im.abs() <= r.radius {
            r.im = 0.0;
        }
    }
    for i in 0..d.len() {
        if d[i].im <= 0.0 {
            continue;
        }
        let conj = Complex64::new(d[i].re, -d[i].im);
        if let Some(j) = (0..d.len()).find(|&j| j != i && d[j].im < 0.0 && d[j].contains_loose(conj, d[i].radius)) {
            let re = 0.5 * (d[i].re + d[j].re);
            let im = 0.5 * (d[i].im - d[j].im);
            let radius = d[i].radius.max(d[j].radius) + (d[i].re - d[j].re).abs();
            d[i] = RootDisk { re, im, radius };
            d[j] = RootDisk { re, im: -im, radius };
        }
    }
}

impl RootDisk {
    fn contains_loose(&self, z: Complex64, extra: f64) -> bool {
        (self.center() - z).norm() <= self.radius + extra
    }
}

pub fn canonical_order(a: &RootDisk, b: &RootDisk) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// `|b|^{1/t}` as an `f64`, valid for any size of `b ≠ 0` that fits the exponent range.
pub fn abs_root(b: &BigInt, t: u32) -> Result<f64> {
    let ln = ln_interval_int(&b.abs())?.mid();
    let r = (ln / t as f64).exp();
    if r.is_finite() {
        Ok(r)
    } else {
        Err(Error::Numerical("t-th root exceeds the floating-point range".into()))
    }
}

/// All `t` roots of `x^t − b` in closed form, `b ≠ 0`, each with a small
/// disk, and the index of the principal one: the positive real root for
/// `b > 0`, the real root for odd `t`, and `|b|^{1/t} e^{iπ/t}` otherwise.
pub fn binomial_roots(b: &BigInt, t: u32) -> Result<(Vec<RootDisk>, usize)> {
    let r = abs_root(b, t)?;
    let phase = if b.is_negative() { PI / t as f64 } else { 0.0 };
    let principal_angle = if b.is_negative() && t % 2 == 1 { PI } else { phase };
    let radius = r * 64.0 * t as f64 * f64::EPSILON;
    let mut roots = Vec::with_capacity(t as usize);
    let mut principal = 0;
    for k in 0..t {
        let angle = phase + 2.0 * PI * k as f64 / t as f64;
        if (angle - principal_angle).abs() < 1e-9 {
            principal = k as usize;
        }
        let z = Complex64::from_polar(r, angle);
        roots.push(RootDisk {
            re: z.re,
            im: z.im,
            radius,
        });
    }
    Ok((roots, principal))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> UPoly {
        UPoly::from_i64s_descending(c)
    }

    #[test]
    fn quadratic_roots() {
        let r = complex_roots(&p(&[1, 0, -2])).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0].re + 2f64.sqrt()).abs() <= r[0].radius + 1e-15);
        assert!((r[1].re - 2f64.sqrt()).abs() <= r[1].radius + 1e-15);
        assert_eq!(r[0].im, 0.0);
    }

    #[test]
    fn conjugate_pairs_order_by_imaginary_part() {
        let r = complex_roots(&p(&[1, 0, 1])).unwrap();
        assert_eq!(r[0].re, r[1].re);
        assert!(r[0].im < 0.0 && r[1].im > 0.0);
        let c = complex_roots(&p(&[1, 0, 0, -5])).unwrap();
        assert!(c[0].im < 0.0 && c[1].im > 0.0 && c[2].im == 0.0);
        assert!((c[2].re - 5f64.cbrt()).abs() < 1e-12);
    }

    #[test]
    fn zero_roots_and_radius_validity() {
        let r = complex_roots(&p(&[1, -3, 0])).unwrap();
        assert_eq!((r[0].re, r[0].radius), (0.0, 0.0));
        assert!(r[1].contains(Complex64::new(3.0, 0.0)));
        let q = p(&[1, -6, 11, -6]);
        let r = complex_roots(&q).unwrap();
        for (d, x) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!(d.contains(Complex64::new(x, 0.0)), "{d:?}");
        }
    }

    #[test]
    fn repeated_roots_are_refused() {
        assert!(complex_roots(&p(&[1, -2, 1])).is_err());
    }

    #[test]
    fn binomial_principal_roots() {
        let (r, k) = binomial_roots(&BigInt::from(8), 3).unwrap();
        assert!((r[k].re - 2.0).abs() < 1e-12 && r[k].im == 0.0);
        let (r, k) = binomial_roots(&BigInt::from(-8), 3).unwrap();
        assert!((r[k].re + 2.0).abs() < 1e-12 && r[k].im.abs() < 1e-12);
        let (r, k) = binomial_roots(&BigInt::from(-4), 2).unwrap();
        assert!(r[k].re.abs() < 1e-12 && (r[k].im - 2.0).abs() < 1e-12);
        let big = BigInt::from(10).pow(400);
        let (r, k) = binomial_roots(&big, 100).unwrap();
        assert!((r[k].re - 1e4).abs() < 1e-6);
    }
}
