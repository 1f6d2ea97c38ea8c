//! Polynomial trend spaces: spherical harmonics of degree `<= l`.
//!
//! Supported: `l = 0` (constants) in any dimension and any `l` on `S^2`, where
//! the basis is the real spherical harmonics normalized to unit mean square.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::dim_n;

const MAX_DEGREE: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrendBasis {
    pub d: usize,
    pub ell: usize,
}

impl TrendBasis {
    pub fn new(d: usize, ell: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!("dimension must be >= 2, got {d}")));
        }
        if ell > 0 && d != 3 {
            return Err(Error::Unsupported(format!(
                "trend degree {ell} > 0 is only available on S^2 (d = 3), got d = {d}"
            )));
        }
        if ell > MAX_DEGREE {
            return Err(Error::Unsupported(format!(
                "trend degree {ell} exceeds {MAX_DEGREE}"
            )));
        }
        Ok(Self { d, ell })
    }

    /// `q = sum_{n <= l} N_{d,n}`.
    pub fn dim(&self) -> usize {
        (0..=self.ell)
            .map(|n| dim_n(self.d, n).expect("small") as usize)
            .sum()
    }

    pub fn id(&self) -> String {
        if self.ell == 0 {
            "constant".to_string()
        } else {
            format!("real-sh-s2-deg{}", self.ell)
        }
    }

    /// Values of all basis functions at the unit vector `x`.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: x.len(),
            });
        }
        if self.ell == 0 {
            return Ok(vec![1.0]);
        }
        Ok(real_harmonics(self.ell, x[0], x[1], x[2]))
    }
}

/// Real spherical harmonics on `S^2` up to degree `ell`, ordered by degree and
/// then `m = 0, 1 (cos), 1 (sin), 2 (cos), ...`, with `(1/4pi) int Y^2 = 1`.
fn real_harmonics(ell: usize, x: f64, y: f64, z: f64) -> Vec<f64> {
    // (x + iy)^m
    let mut re = vec![1.0; ell + 1];
    let mut im = vec![0.0; ell + 1];
    for m in 1..=ell {
        re[m] = re[m - 1] * x - im[m - 1] * y;
        im[m] = re[m - 1] * y + im[m - 1] * x;
    }
    // q[l][m] with P_l^m(z) = (1 - z^2)^(m/2) q[l][m]
    let mut q = vec![vec![0.0; ell + 1]; ell + 1];
    let mut diag = 1.0;
    for m in 0..=ell {
        if m > 0 {
            diag *= (2 * m - 1) as f64;
        }
        q[m][m] = diag;
        if m < ell {
            q[m + 1][m] = z * (2 * m + 1) as f64 * diag;
        }
        for l in m + 2..=ell {
            q[l][m] = ((2 * l - 1) as f64 * z * q[l - 1][m] - (l + m - 1) as f64 * q[l - 2][m])
                / (l - m) as f64;
        }
    }
    let mut out = Vec::with_capacity((ell + 1) * (ell + 1));
    for l in 0..=ell {
        let lf = (2 * l + 1) as f64;
        out.push(lf.sqrt() * q[l][0]);
        for m in 1..=l {
            // (l - m)! / (l + m)!
            let ratio: f64 = ((l - m + 1)..=(l + m)).map(|k| 1.0 / k as f64).product();
            let c = (2.0 * lf * ratio).sqrt() * q[l][m];
            out.push(c * re[m]);
            out.push(c * im[m]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::zonal_w;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
        loop {
            let v = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0f64..1.0),
            ];
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if n > 0.1 && n <= 1.0 {
                return [v[0] / n, v[1] / n, v[2] / n];
            }
        }
    }

    #[test]
    fn dimensions() {
        assert_eq!(TrendBasis::new(7, 0).unwrap().dim(), 1);
        assert_eq!(TrendBasis::new(3, 1).unwrap().dim(), 4);
        assert_eq!(TrendBasis::new(3, 2).unwrap().dim(), 9);
        assert!(matches!(TrendBasis::new(4, 1), Err(Error::Unsupported(_))));
        let b = TrendBasis::new(3, 5).unwrap();
        assert_eq!(b.eval(&[0.0, 0.0, 1.0]).unwrap().len(), b.dim());
        assert!(b.eval(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn addition_theorem() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ell = 8;
        for _ in 0..50 {
            let (a, b) = (random_unit(&mut rng), random_unit(&mut rng));
            let ya = real_harmonics(ell, a[0], a[1], a[2]);
            let yb = real_harmonics(ell, b[0], b[1], b[2]);
            let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
            let mut start = 0;
            for n in 0..=ell {
                let len = 2 * n + 1;
                let sum: f64 = (start..start + len).map(|i| ya[i] * yb[i]).sum();
                let want = len as f64 * zonal_w(n, 3, dot.clamp(-1.0, 1.0)).unwrap();
                assert!(
                    (sum - want).abs() <= 1e-11 * len as f64,
                    "n={n}: {sum} vs {want}"
                );
                start += len;
            }
        }
    }

    #[test]
    fn orthonormal_under_mean_square() {
        // Gauss-Legendre in z times trapezoid in azimuth is exact for these degrees
        let ell = 4;
        let (zs, ws) = crate::quadrature::gauss_legendre(12);
        let na = 24;
        let q = (ell + 1) * (ell + 1);
        let mut gram = vec![vec![0.0; q]; q];
        for (z, w) in zs.iter().zip(&ws) {
            for k in 0..na {
                let phi = 2.0 * std::f64::consts::PI * k as f64 / na as f64;
                let r = (1.0 - z * z).sqrt();
                let y = real_harmonics(ell, r * phi.cos(), r * phi.sin(), *z);
                for i in 0..q {
                    for j in 0..q {
                        gram[i][j] += w * y[i] * y[j] / (2.0 * na as f64);
                    }
                }
            }
        }
        for (i, row) in gram.iter().enumerate() {
            for (j, g) in row.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - want).abs() <= 1e-12, "({i},{j}) = {g}");
            }
        }
    }
}
