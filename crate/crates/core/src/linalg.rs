//! Small dense kernels used on the per-sample hot path.
//!
//! Everything here works on plain slices so that workers can reuse their
//! buffers across millions of projections without allocating.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|v| v.is_finite())
}

/// Returns `a / ‖a‖`, or `None` for the zero vector.
pub fn normalized(a: &[f64]) -> Option<Vec<f64>> {
    let n = norm(a);
    if n > 0.0 && n.is_finite() {
        Some(a.iter().map(|v| v / n).collect())
    } else {
        None
    }
}

/// Angle between two nonzero vectors with the clamped-arccos convention;
/// `π/2` if exactly one of them is zero and `0` if both are.
pub fn angle_between(a: &[f64], b: &[f64]) -> f64 {
    let na = norm(a);
    let nb = norm(b);
    match (na > 0.0, nb > 0.0) {
        (false, false) => 0.0,
        (true, false) | (false, true) => std::f64::consts::FRAC_PI_2,
        (true, true) => (dot(a, b) / (na * nb)).clamp(-1.0, 1.0).acos(),
    }
}

/// Givens rotation by `theta` acting on coordinates `(i, j)` (0-based).
pub fn givens(v: &mut [f64], i: usize, j: usize, theta: f64) {
    let (s, c) = theta.sin_cos();
    let (a, b) = (v[i], v[j]);
    v[i] = c * a - s * b;
    v[j] = s * a + c * b;
}

/// Reusable buffers for least squares on a column subset.
#[derive(Debug, Clone, Default)]
pub struct LsqWorkspace {
    a: Vec<f64>,
    rhs: Vec<f64>,
}

/// Outcome of a Householder least-squares solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsqStatus {
    Ok,
    /// A column fell below the relative pivot threshold.
    RankDeficient,
}

impl LsqWorkspace {
    /// Solves `min ‖A z − b‖` where the columns of `A` are the rows
    /// `cols[..]` of the row-major generator table `gens` (each of length `d`).
    /// Writes the coefficients into `z[..cols.len()]`.
    pub fn solve(
        &mut self,
        gens: &[f64],
        d: usize,
        cols: &[usize],
        b: &[f64],
        z: &mut [f64],
    ) -> LsqStatus {
        let p = cols.len();
        self.a.clear();
        for &c in cols {
            self.a.extend_from_slice(&gens[c * d..(c + 1) * d]);
        }
        self.rhs.clear();
        self.rhs.extend_from_slice(b);
        let a = &mut self.a;
        let rhs = &mut self.rhs;
        if p > d {
            return LsqStatus::RankDeficient;
        }
        let mut scale = 0.0_f64;
        // Householder QR, column k stored at a[k*d..(k+1)*d].
        for k in 0..p {
            let col = &mut a[k * d..(k + 1) * d];
            let alpha_sq: f64 = col[k..].iter().map(|v| v * v).sum();
            let alpha = alpha_sq.sqrt();
            scale = scale.max(alpha);
            if alpha <= 1e-12 * scale.max(1e-300) {
                return LsqStatus::RankDeficient;
            }
            let sign = if col[k] >= 0.0 { 1.0 } else { -1.0 };
            let r_kk = -sign * alpha;
            col[k] -= r_kk;
            let vnorm_sq: f64 = col[k..].iter().map(|v| v * v).sum();
            // Apply reflector to remaining columns and rhs.
            let (head, tail) = a.split_at_mut((k + 1) * d);
            let v = &head[k * d..(k + 1) * d];
            for j in 0..(p - k - 1) {
                let cj = &mut tail[j * d..(j + 1) * d];
                let s: f64 = (k..d).map(|i| v[i] * cj[i]).sum::<f64>() * 2.0 / vnorm_sq;
                for i in k..d {
                    cj[i] -= s * v[i];
                }
            }
            let s: f64 = (k..d).map(|i| v[i] * rhs[i]).sum::<f64>() * 2.0 / vnorm_sq;
            for i in k..d {
                rhs[i] -= s * v[i];
            }
            // Store the diagonal in the (now unused) v[k] slot after use.
            head[k * d + k] = r_kk;
            for i in (k + 1)..d {
                head[k * d + i] = 0.0;
            }
        }
        // Back substitution with R stored column-major in a.
        for k in (0..p).rev() {
            let mut s = rhs[k];
            for j in (k + 1)..p {
                s -= a[j * d + k] * z[j];
            }
            z[k] = s / a[k * d + k];
        }
        LsqStatus::Ok
    }
}

/// Numerical rank of the rows `rows` of a row-major `n × d` table, by
/// Householder QR with column pivoting (on the transposed matrix, whose
/// columns are the selected vectors). Columns whose remaining norm falls
/// below `rel_tol` times the leading diagonal are treated as dependent.
pub fn rank_of_rows(
    gens: &[f64],
    d: usize,
    rows: &[usize],
    rel_tol: f64,
    buf: &mut Vec<f64>,
) -> usize {
    let p = rows.len();
    if p == 0 {
        return 0;
    }
    buf.clear();
    for &r in rows {
        buf.extend_from_slice(&gens[r * d..(r + 1) * d]);
    }
    let mut norms: Vec<f64> = (0..p).map(|j| norm_sq(&buf[j * d..(j + 1) * d])).collect();
    let mut lead = 0.0_f64;
    let steps = p.min(d);
    for k in 0..steps {
        // pivot: column with the largest remaining norm
        let (piv, &best) = norms[k..]
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, v)| (i + k, v))
            .unwrap();
        if piv != k {
            norms.swap(k, piv);
            for i in 0..d {
                buf.swap(k * d + i, piv * d + i);
            }
        }
        let alpha = best.max(0.0).sqrt();
        if k == 0 {
            lead = alpha;
        }
        if alpha <= rel_tol * lead || alpha == 0.0 {
            return k;
        }
        // Recompute the exact remaining norm of column k from rows k..d.
        let col_norm: f64 = buf[k * d + k..(k + 1) * d]
            .iter()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt();
        if col_norm <= rel_tol * lead {
            return k;
        }
        let sign = if buf[k * d + k] >= 0.0 { 1.0 } else { -1.0 };
        let r_kk = -sign * col_norm;
        buf[k * d + k] -= r_kk;
        let vnorm_sq: f64 = buf[k * d + k..(k + 1) * d].iter().map(|v| v * v).sum();
        let (head, tail) = buf.split_at_mut((k + 1) * d);
        let v = &head[k * d..(k + 1) * d];
        for j in 0..(p - k - 1) {
            let cj = &mut tail[j * d..(j + 1) * d];
            let s: f64 = (k..d).map(|i| v[i] * cj[i]).sum::<f64>() * 2.0 / vnorm_sq;
            for i in k..d {
                cj[i] -= s * v[i];
            }
            norms[k + 1 + j] = cj[k + 1..].iter().map(|x| x * x).sum();
        }
    }
    steps
}
