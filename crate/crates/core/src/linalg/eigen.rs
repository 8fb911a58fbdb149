use serde::{Deserialize, Serialize};

use super::{require_square, LinalgError, Matrix, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn dist(self, other: Complex) -> f64 {
        (self.re - other.re).hypot(self.im - other.im)
    }
}

/// Eigenvalues of a real square matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<Complex>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn max_real(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.abs()).fold(0.0, f64::max)
    }

    /// Eigenvalues ordered by real part, then imaginary part.
    pub fn sorted(&self) -> Vec<Complex> {
        let mut v = self.eigenvalues.clone();
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    /// Largest distance between two spectra under a greedy nearest matching.
    pub fn match_distance(&self, other: &Spectrum) -> f64 {
        if self.len() != other.len() {
            return f64::INFINITY;
        }
        let mut pool = other.eigenvalues.clone();
        let mut worst: f64 = 0.0;
        for z in self.sorted() {
            let (k, d) = pool
                .iter()
                .enumerate()
                .map(|(k, w)| (k, z.dist(*w)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("non-empty pool");
            worst = worst.max(d);
            pool.swap_remove(k);
        }
        worst
    }
}

/// All eigenvalues by balancing, Householder reduction to Hessenberg form
/// and the Francis double-shift QR iteration.
pub fn eigenvalues(m: &Matrix) -> Result<Spectrum, LinalgError> {
    require_square(m)?;
    let mut a = m.clone();
    balance(&mut a);
    hessenberg(&mut a);
    let eigenvalues = hqr(&mut a)?;
    Ok(Spectrum { eigenvalues })
}

pub fn spectral_abscissa(m: &Matrix) -> Result<f64, LinalgError> {
    Ok(eigenvalues(m)?.max_real())
}

fn balance(a: &mut Matrix) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let n = a.rows();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= g;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

fn hessenberg(a: &mut Matrix) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    let mut v = vec![0.0; n];
    for k in 0..n - 2 {
        let alpha_norm = ((k + 1)..n)
            .map(|i| a[(i, k)] * a[(i, k)])
            .sum::<f64>()
            .sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let alpha = if x0 >= 0.0 { -alpha_norm } else { alpha_norm };
        for i in 0..n {
            v[i] = if i > k { a[(i, k)] } else { 0.0 };
        }
        v[k + 1] -= alpha;
        let vnorm2: f64 = v[k + 1..].iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // A ← (I − 2vvᵀ/vᵀv) A
        for j in 0..n {
            let s: f64 = ((k + 1)..n).map(|i| v[i] * a[(i, j)]).sum::<f64>() * 2.0 / vnorm2;
            for i in (k + 1)..n {
                a[(i, j)] -= s * v[i];
            }
        }
        // A ← A (I − 2vvᵀ/vᵀv)
        for i in 0..n {
            let s: f64 = ((k + 1)..n).map(|j| a[(i, j)] * v[j]).sum::<f64>() * 2.0 / vnorm2;
            for j in (k + 1)..n {
                a[(i, j)] -= s * v[j];
            }
        }
        a[(k + 1, k)] = alpha;
        for i in (k + 2)..n {
            a[(i, k)] = 0.0;
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix (destroyed).
fn hqr(a: &mut Matrix) -> Result<Vec<Complex>, LinalgError> {
    let n = a.rows();
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    let max_its = Tolerances::QR_ITERATIONS_PER_EIGENVALUE;

    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[(i, j)].abs();
        }
    }

    let at = |a: &Matrix, i: isize, j: isize| a[(i as usize, j as usize)];

    let mut nn = n as isize - 1;
    let mut t = 0.0;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 1 {
                let mut s = at(a, l - 1, l - 1).abs() + at(a, l, l).abs();
                if s == 0.0 {
                    s = anorm;
                }
                if at(a, l, l - 1).abs() + s == s {
                    a[(l as usize, l as usize - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = at(a, nn, nn);
            if l == nn {
                wr[nn as usize] = x + t;
                wi[nn as usize] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = at(a, nn - 1, nn - 1);
            let mut w = at(a, nn, nn - 1) * at(a, nn - 1, nn);
            if l == nn - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x += t;
                let (i1, i0) = (nn as usize, nn as usize - 1);
                if q >= 0.0 {
                    z = p + sign(z, p);
                    wr[i0] = x + z;
                    wr[i1] = x + z;
                    if z != 0.0 {
                        wr[i1] = x - w / z;
                    }
                    wi[i0] = 0.0;
                    wi[i1] = 0.0;
                } else {
                    wr[i0] = x + p;
                    wr[i1] = x + p;
                    wi[i0] = -z;
                    wi[i1] = z;
                }
                nn -= 2;
                break;
            }
            if its == max_its {
                return Err(LinalgError::NoConvergence(max_its));
            }
            if its == 10 || its == 20 {
                t += x;
                for i in 0..=nn {
                    a[(i as usize, i as usize)] -= x;
                }
                let s = at(a, nn, nn - 1).abs() + at(a, nn - 1, nn - 2).abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;

            let (mut p, mut q, mut r) = (0.0, 0.0, 0.0);
            let mut z;
            let mut m = nn - 2;
            while m >= l {
                z = at(a, m, m);
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / at(a, m + 1, m) + at(a, m, m + 1);
                q = at(a, m + 1, m + 1) - z - rr - ss;
                r = at(a, m + 2, m + 1);
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = at(a, m, m - 1).abs() * (q.abs() + r.abs());
                let v = p.abs() * (at(a, m - 1, m - 1).abs() + z.abs() + at(a, m + 1, m + 1).abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nn {
                a[(i as usize, i as usize - 2)] = 0.0;
                if i != m + 2 {
                    a[(i as usize, i as usize - 3)] = 0.0;
                }
            }
            let mut k = m;
            while k < nn {
                if k != m {
                    p = at(a, k, k - 1);
                    q = at(a, k + 1, k - 1);
                    r = 0.0;
                    if k != nn - 1 {
                        r = at(a, k + 2, k - 1);
                    }
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            let e = &mut a[(k as usize, k as usize - 1)];
                            *e = -*e;
                        }
                    } else {
                        a[(k as usize, k as usize - 1)] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    let (ku, nnu) = (k as usize, nn as usize);
                    for j in ku..=nnu {
                        let mut pp = a[(ku, j)] + q * a[(ku + 1, j)];
                        if k != nn - 1 {
                            pp += r * a[(ku + 2, j)];
                            a[(ku + 2, j)] -= pp * z;
                        }
                        a[(ku + 1, j)] -= pp * y;
                        a[(ku, j)] -= pp * x;
                    }
                    let mmin = if nn < k + 3 { nn } else { k + 3 } as usize;
                    for i in (l as usize)..=mmin {
                        let mut pp = x * a[(i, ku)] + y * a[(i, ku + 1)];
                        if k != nn - 1 {
                            pp += z * a[(i, ku + 2)];
                            a[(i, ku + 2)] -= pp * r;
                        }
                        a[(i, ku + 1)] -= pp * q;
                        a[(i, ku)] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(wr
        .into_iter()
        .zip(wi)
        .map(|(re, im)| Complex::new(re, im))
        .collect())
}

/// Eigen-decomposition of a symmetric matrix; values ascending, vectors as columns.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl SymmetricEigen {
    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NEG_INFINITY)
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::INFINITY)
    }

    /// V·diag(values)·Vᵀ.
    pub fn reconstruct(&self) -> Matrix {
        let d = Matrix::diag(&self.values);
        &(&self.vectors * &d) * &self.vectors.transpose()
    }
}

fn check_symmetric(s: &Matrix) -> Result<(), LinalgError> {
    require_square(s)?;
    let asym = s.asymmetry();
    if asym > Tolerances::SYMMETRY * s.norm_fro() {
        return Err(LinalgError::NotSymmetric(asym));
    }
    Ok(())
}

/// Cyclic Jacobi rotations.
pub fn symmetric_eigen(s: &Matrix) -> Result<SymmetricEigen, LinalgError> {
    check_symmetric(s)?;
    let n = s.rows();
    let mut a = s.sym();
    let mut v = Matrix::identity(n);
    let scale = a.norm_fro();
    for _ in 0..Tolerances::JACOBI_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() <= f64::EPSILON * 1e-2 * scale || off == 0.0 {
            return Ok(sorted_eigen(a.diagonal(), v));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    sign(1.0, theta) / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
    }
    Err(LinalgError::NoConvergence(Tolerances::JACOBI_SWEEPS))
}

fn sorted_eigen(values: Vec<f64>, v: Matrix) -> SymmetricEigen {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let vectors = Matrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    SymmetricEigen {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors,
    }
}

/// True iff the largest eigenvalue of `s` is below `−margin`.
pub fn is_negative_definite(s: &Matrix, margin: f64) -> Result<bool, LinalgError> {
    Ok(symmetric_eigen(s)?.max() < -margin)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_spectrum() {
        let s = eigenvalues(&Matrix::identity(3)).unwrap();
        assert!(s
            .eigenvalues
            .iter()
            .all(|z| (z.re - 1.0).abs() < 1e-14 && z.im == 0.0));
    }

    #[test]
    fn rotation_generator() {
        let s = eigenvalues(&Matrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])).unwrap();
        let v = s.sorted();
        assert!((v[0].im + 1.0).abs() < 1e-14 && (v[1].im - 1.0).abs() < 1e-14);
        assert!(v[0].re.abs() < 1e-14);
    }

    #[test]
    fn companion_roots() {
        // roots 1, 2, 3, 4 plus ±2i
        let c = super::super::poly_from_roots(&[1.0, 2.0, 3.0, 4.0]);
        let mut coeffs = [0.0; 7];
        // multiply by s² + 4
        for (k, a) in c.iter().enumerate() {
            coeffs[k] += a;
            coeffs[k + 2] += 4.0 * a;
        }
        let n = 6;
        let comp = Matrix::from_fn(n, n, |i, j| {
            if i == 0 {
                -coeffs[j + 1]
            } else if i == j + 1 {
                1.0
            } else {
                0.0
            }
        });
        let s = eigenvalues(&comp).unwrap();
        let expected = Spectrum {
            eigenvalues: vec![
                Complex::new(1.0, 0.0),
                Complex::new(2.0, 0.0),
                Complex::new(3.0, 0.0),
                Complex::new(4.0, 0.0),
                Complex::new(0.0, 2.0),
                Complex::new(0.0, -2.0),
            ],
        };
        assert!(s.match_distance(&expected) < 1e-9);
    }

    #[test]
    fn jacobi_reconstructs() {
        let s = Matrix::from_row_slice(3, 3, &[2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0]);
        let e = symmetric_eigen(&s).unwrap();
        let r2 = 2f64.sqrt();
        assert!((e.values[0] - (2.0 - r2)).abs() < 1e-14);
        assert!((e.values[2] - (2.0 + r2)).abs() < 1e-14);
        assert!(e.reconstruct().max_abs_diff(&s) < 1e-14);
    }

    #[test]
    fn definiteness() {
        assert!(is_negative_definite(&Matrix::diag(&[-1.0, -2.0]), 0.0).unwrap());
        assert!(!is_negative_definite(&Matrix::diag(&[-1.0, 0.25]), 0.0).unwrap());
        let bad = Matrix::from_row_slice(2, 2, &[-1.0, 1.0, 0.0, -1.0]);
        assert!(matches!(
            is_negative_definite(&bad, 0.0),
            Err(LinalgError::NotSymmetric(_))
        ));
    }

    #[test]
    fn rejects_non_square() {
        assert!(matches!(
            eigenvalues(&Matrix::zeros(2, 3)),
            Err(LinalgError::NotSquare { rows: 2, cols: 3 })
        ));
    }
}
