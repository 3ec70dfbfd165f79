use alloc::vec::Vec;

/// Least-squares solve of `A x ≈ y` for a tall `m × N` system by Householder QR.
/// Returns the coefficients and the root-mean-square residual, or `None` when
/// `A` is rank deficient.
pub(crate) fn least_squares<const N: usize>(rows: &[[f64; N]], y: &[f64]) -> Option<([f64; N], f64)> {
    let m = rows.len();
    if m < N || y.len() != m {
        return None;
    }
    let mut a: Vec<[f64; N]> = rows.to_vec();
    let mut b: Vec<f64> = y.to_vec();

    for k in 0..N {
        let norm = libm::sqrt((k..m).map(|i| a[i][k] * a[i][k]).sum::<f64>());
        if norm == 0.0 {
            return None;
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..m).map(|i| a[i][k]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for j in k..N {
            let dot: f64 = (k..m).map(|i| v[i - k] * a[i][j]).sum();
            let s = 2.0 * dot / vnorm2;
            for i in k..m {
                a[i][j] -= s * v[i - k];
            }
        }
        let dot: f64 = (k..m).map(|i| v[i - k] * b[i]).sum();
        let s = 2.0 * dot / vnorm2;
        for i in k..m {
            b[i] -= s * v[i - k];
        }
    }

    let scale = (0..N).map(|k| a[k][k].abs()).fold(0.0, f64::max);
    let mut x = [0.0; N];
    for k in (0..N).rev() {
        if a[k][k].abs() <= 1e-14 * scale {
            return None;
        }
        let s: f64 = (k + 1..N).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }

    let ss: f64 = rows
        .iter()
        .zip(y)
        .map(|(r, yi)| {
            let fit: f64 = r.iter().zip(&x).map(|(ri, xi)| ri * xi).sum();
            (yi - fit) * (yi - fit)
        })
        .sum();
    Some((x, libm::sqrt(ss / m as f64)))
}
