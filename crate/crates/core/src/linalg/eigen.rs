use crate::C64;

/// Eigenvalues of a real symmetric `n x n` matrix (row-major), ascending.
///
/// Cyclic Jacobi sweeps until the off-diagonal mass is negligible relative to
/// the Frobenius norm. At the sizes used here (n <= 128) this converges to
/// machine precision in well under 20 sweeps.
pub fn symmetric_eigenvalues(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    assert_eq!(a.len(), n * n, "matrix storage does not match dimension");
    let total: f64 = a.iter().map(|x| x * x).sum();
    if total == 0.0 {
        return vec![0.0; n];
    }
    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off <= 1e-32 * total {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Eigenvalues of a Hermitian `d x d` matrix, ascending.
///
/// Works on the real embedding `[[Re, -Im], [Im, Re]]`, whose spectrum is the
/// Hermitian spectrum with every eigenvalue doubled.
pub fn hermitian_eigenvalues(entries: &[C64], d: usize) -> Vec<f64> {
    let n = 2 * d;
    let mut real = vec![0.0; n * n];
    for i in 0..d {
        for j in 0..d {
            // Symmetrise so tiny Hermiticity defects cannot break Jacobi.
            let z = (entries[i * d + j] + entries[j * d + i].conj()) * 0.5;
            real[i * n + j] = z.re;
            real[(i + d) * n + (j + d)] = z.re;
            real[i * n + (j + d)] = -z.im;
            real[(i + d) * n + j] = z.im;
        }
    }
    let doubled = symmetric_eigenvalues(real, n);
    doubled
        .chunks_exact(2)
        .map(|pair| 0.5 * (pair[0] + pair[1]))
        .collect()
}
