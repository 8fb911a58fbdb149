use super::{require_square, solve_linear, LinalgError, Matrix};

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
#[allow(clippy::excessive_precision)]
const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA13: f64 = 5.371920351148152e0;

/// exp(A·t) by Padé scaling and squaring.
pub fn matrix_exponential(a: &Matrix, t: f64) -> Result<Matrix, LinalgError> {
    let n = require_square(a)?;
    if !t.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let at = a.scale(t);
    let norm = at.norm_one();
    if norm == 0.0 {
        return Ok(Matrix::identity(n));
    }
    for (deg, theta) in THETA {
        if norm <= theta {
            let coeffs: &[f64] = match deg {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            return finish(pade_low(&at, coeffs), 0, norm);
        }
    }
    let s = (norm / THETA13).log2().ceil().max(0.0);
    if s > 1000.0 {
        return Err(LinalgError::Overflow(norm));
    }
    let s = s as u32;
    let scaled = at.scale(0.5f64.powi(s as i32));
    finish(pade13(&scaled), s, norm)
}

fn finish(uv: (Matrix, Matrix), squarings: u32, norm: f64) -> Result<Matrix, LinalgError> {
    let (u, v) = uv;
    let mut r = solve_linear(&(&v - &u), &(&v + &u))?;
    for _ in 0..squarings {
        r = &r * &r;
        if !r.is_finite() {
            return Err(LinalgError::Overflow(norm));
        }
    }
    if !r.is_finite() {
        return Err(LinalgError::Overflow(norm));
    }
    Ok(r)
}

fn pade_low(a: &Matrix, b: &[f64]) -> (Matrix, Matrix) {
    let n = a.rows();
    let a2 = a * a;
    let mut powers = vec![Matrix::identity(n)];
    for k in 1..b.len().div_ceil(2) {
        powers.push(&powers[k - 1] * &a2);
    }
    let mut u = Matrix::zeros(n, n);
    let mut v = Matrix::zeros(n, n);
    for (k, p) in powers.iter().enumerate() {
        v += &p.scale(b[2 * k]);
        if 2 * k + 1 < b.len() {
            u += &p.scale(b[2 * k + 1]);
        }
    }
    (a * &u, v)
}

fn pade13(a: &Matrix) -> (Matrix, Matrix) {
    let b = &B13;
    let n = a.rows();
    let id = Matrix::identity(n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &(&a6.scale(b[13]) + &a4.scale(b[11])) + &a2.scale(b[9]);
    let outer_u = &(&(&(&a6 * &inner_u) + &a6.scale(b[7])) + &a4.scale(b[5]))
        + &(&a2.scale(b[3]) + &id.scale(b[1]));
    let u = a * &outer_u;
    let inner_v = &(&a6.scale(b[12]) + &a4.scale(b[10])) + &a2.scale(b[8]);
    let v = &(&(&(&a6 * &inner_v) + &a6.scale(b[6])) + &a4.scale(b[4]))
        + &(&a2.scale(b[2]) + &id.scale(b[0]));
    (u, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_is_identity() {
        assert_eq!(
            matrix_exponential(&Matrix::zeros(3, 3), 1.0).unwrap(),
            Matrix::identity(3)
        );
    }

    #[test]
    fn diagonal() {
        for t in [1e-3, 0.3, 2.0, 10.0] {
            let e = matrix_exponential(&Matrix::diag(&[-1.0, 2.0]), t).unwrap();
            assert!((e[(0, 0)] / (-t).exp() - 1.0).abs() < 1e-13);
            assert!((e[(1, 1)] / (2.0 * t).exp() - 1.0).abs() < 1e-13);
            assert_eq!(e[(0, 1)], 0.0);
        }
    }

    #[test]
    fn nilpotent() {
        let n = Matrix::from_row_slice(2, 2, &[0.0, 3.0, 0.0, 0.0]);
        let e = matrix_exponential(&n, 2.0).unwrap();
        assert!(e.max_abs_diff(&Matrix::from_row_slice(2, 2, &[1.0, 6.0, 0.0, 1.0])) < 1e-15);
    }

    #[test]
    fn rotation() {
        let g = Matrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let t = 40.0;
        let e = matrix_exponential(&g, t).unwrap();
        let exact = Matrix::from_row_slice(2, 2, &[t.cos(), t.sin(), -t.sin(), t.cos()]);
        assert!(e.max_abs_diff(&exact) < 1e-11);
    }

    #[test]
    fn overflow_reported() {
        assert!(matches!(
            matrix_exponential(&Matrix::diag(&[1.0]), 1e4),
            Err(LinalgError::Overflow(_))
        ));
    }
}
