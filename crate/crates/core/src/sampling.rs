//! Haar sampling of O(N) and Sp(2n), eigenangles, trace vectors and
//! Monte-Carlo estimators.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::{deterministic_power_sum, mean_trace, GroupKind, GroupSpec};
use crate::moments::Multiplicities;

/// Tolerance for locating the forced ±1 eigenvalues.
pub const DETERMINISTIC_EIG_TOL: f64 = 1e-6;

/// Generator for draw `index` of the stream (seed, stream_id).
pub fn draw_rng(seed: u64, stream_id: u32, index: u32) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(((stream_id as u64) << 32) | index as u64);
    rng
}

/// Requested determinant component for [`haar_orthogonal`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DetSign {
    Plus,
    Minus,
    Either,
}

fn gaussian_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Haar orthogonal matrix by Gaussian QR with the R-diagonal sign fix; a
/// determinant request is met by negating the first column.
pub fn haar_orthogonal_with<R: Rng>(dim: usize, sign: DetSign, rng: &mut R) -> DMatrix<f64> {
    let qr = gaussian_matrix(dim, dim, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        if r[(j, j)] < 0.0 {
            col.neg_mut();
        }
    }
    let want = match sign {
        DetSign::Plus => Some(1.0),
        DetSign::Minus => Some(-1.0),
        DetSign::Either => None,
    };
    if let Some(w) = want {
        if q.determinant().signum() != w {
            q.column_mut(0).neg_mut();
        }
    }
    q
}

pub fn haar_orthogonal(dim: usize, sign: DetSign, seed: u64) -> DMatrix<f64> {
    haar_orthogonal_with(dim, sign, &mut draw_rng(seed, 0, 0))
}

fn complex_gaussian<R: Rng>(len: usize, rng: &mut R) -> DVector<Complex64> {
    DVector::from_fn(len, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// −J z̄ with J = [[0, I], [−I, 0]].
fn skew_partner(u: &DVector<Complex64>, half: usize) -> DVector<Complex64> {
    DVector::from_fn(2 * half, |i, _| {
        if i < half {
            -u[half + i].conj()
        } else {
            u[i - half].conj()
        }
    })
}

/// Haar element of the unitary symplectic group Sp(two_n), built column pair by
/// column pair with structure-preserving Gram–Schmidt.
pub fn haar_symplectic_with<R: Rng>(two_n: usize, rng: &mut R) -> DMatrix<Complex64> {
    assert!(
        two_n >= 2 && two_n.is_multiple_of(2),
        "symplectic dimension must be even"
    );
    let half = two_n / 2;
    let mut basis: Vec<DVector<Complex64>> = Vec::with_capacity(two_n);
    let mut cols = vec![DVector::zeros(two_n); two_n];
    for k in 0..half {
        let mut u = complex_gaussian(two_n, rng);
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dotc(&u);
                u -= b * proj;
            }
        }
        let norm = u.norm();
        u /= Complex64::new(norm, 0.0);
        let v = skew_partner(&u, half);
        basis.push(u.clone());
        basis.push(v.clone());
        cols[k] = u;
        cols[half + k] = v;
    }
    DMatrix::from_columns(&cols)
}

pub fn haar_symplectic(two_n: usize, seed: u64) -> DMatrix<Complex64> {
    haar_symplectic_with(two_n, &mut draw_rng(seed, 0, 0))
}

/// J = [[0, I], [−I, 0]] of size two_n.
pub fn symplectic_form(two_n: usize) -> DMatrix<Complex64> {
    let half = two_n / 2;
    DMatrix::from_fn(two_n, two_n, |i, j| {
        if i < half && j == i + half {
            Complex64::new(1.0, 0.0)
        } else if i >= half && j + half == i {
            Complex64::new(-1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// A sampled group element.
#[derive(Debug, Clone)]
pub enum HaarMatrix {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

impl HaarMatrix {
    pub fn dim(&self) -> usize {
        match self {
            HaarMatrix::Real(m) => m.nrows(),
            HaarMatrix::Complex(m) => m.nrows(),
        }
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        match self {
            HaarMatrix::Real(m) => m.complex_eigenvalues().iter().cloned().collect(),
            HaarMatrix::Complex(m) => {
                let (_, t) = Schur::new(m.clone()).unpack();
                t.diagonal().iter().cloned().collect()
            }
        }
    }

    /// Tr Uᵏ for k = 1..=m over all eigenvalues, via Tr(U^a U^b) with a + b = k.
    pub fn power_traces(&self, m: usize) -> Vec<f64> {
        match self {
            HaarMatrix::Real(u) => power_traces_generic(u, m, |x| *x),
            HaarMatrix::Complex(u) => power_traces_generic(u, m, |z| z.re),
        }
    }
}

fn power_traces_generic<T, F>(u: &DMatrix<T>, m: usize, re: F) -> Vec<f64>
where
    T: nalgebra::Scalar + nalgebra::ComplexField,
    F: Fn(&T) -> f64,
{
    let h = m.div_ceil(2).max(1);
    let mut powers = vec![u.clone()];
    for _ in 1..h {
        let next = powers.last().unwrap() * u;
        powers.push(next);
    }
    (1..=m)
        .map(|k| {
            let a = k.div_ceil(2);
            let b = k - a;
            if b == 0 {
                return re(&powers[a - 1].trace());
            }
            let (pa, pb) = (&powers[a - 1], &powers[b - 1]);
            // Tr(P Q) = Σ_ij P_ij Q_ji
            let mut acc = T::zero();
            for i in 0..u.nrows() {
                for j in 0..u.nrows() {
                    acc += pa[(i, j)].clone() * pb[(j, i)].clone();
                }
            }
            re(&acc)
        })
        .collect()
}

/// Draws one element of the ensemble described by `spec`.
pub fn sample_group<R: Rng>(spec: &GroupSpec, rng: &mut R) -> HaarMatrix {
    match spec.kind {
        GroupKind::Sp => HaarMatrix::Complex(haar_symplectic_with(spec.matrix_dim, rng)),
        GroupKind::OEvenPlus | GroupKind::OOddPlus => {
            HaarMatrix::Real(haar_orthogonal_with(spec.matrix_dim, DetSign::Plus, rng))
        }
        GroupKind::OEvenMinus | GroupKind::OOddMinus => {
            HaarMatrix::Real(haar_orthogonal_with(spec.matrix_dim, DetSign::Minus, rng))
        }
    }
}

/// Random eigenangles in [0, π], ascending: forced ±1 eigenvalues are removed
/// (exactly |det_eigs| of them) and each conjugate pair contributes one angle.
pub fn eigenangles(matrix: &HaarMatrix, spec: &GroupSpec) -> Result<Vec<f64>> {
    if matrix.dim() != spec.matrix_dim {
        return Err(Error::WrongLength {
            expected: spec.matrix_dim,
            got: matrix.dim(),
        });
    }
    let mut eigs = matrix.eigenvalues();
    for &d in &spec.det_eigs {
        let target = Complex64::new(d as f64, 0.0);
        let (pos, dist) = eigs
            .iter()
            .enumerate()
            .map(|(i, z)| (i, (z - target).norm()))
            .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        if dist > DETERMINISTIC_EIG_TOL {
            return Err(Error::Eigen(format!(
                "no eigenvalue within {DETERMINISTIC_EIG_TOL} of {d} (closest at distance {dist:.3e})"
            )));
        }
        eigs.swap_remove(pos);
    }
    let mut args: Vec<f64> = eigs.iter().map(|z| z.arg().abs()).collect();
    args.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(args.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect())
}

/// Largest gap between the angles of a conjugate pair (after forced-eigenvalue removal).
pub fn pairing_defect(matrix: &HaarMatrix, spec: &GroupSpec) -> f64 {
    let mut eigs = matrix.eigenvalues();
    for &d in &spec.det_eigs {
        let target = Complex64::new(d as f64, 0.0);
        if let Some((pos, _)) = eigs
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - target).norm().partial_cmp(&(b.1 - target).norm()).unwrap())
        {
            eigs.swap_remove(pos);
        }
    }
    let mut pos: Vec<Complex64> = eigs.iter().filter(|z| z.im > 0.0).cloned().collect();
    let mut neg: Vec<Complex64> = eigs.iter().filter(|z| z.im < 0.0).map(|z| z.conj()).collect();
    let key = |z: &Complex64| z.arg();
    pos.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
    neg.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
    if pos.len() != neg.len() {
        return f64::INFINITY;
    }
    pos.iter().zip(&neg).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
}

/// Σ_j 2cos(kθ_j) for k = 1..=m.
pub fn traces_from_angles(angles: &[f64], m: usize) -> Vec<f64> {
    (1..=m)
        .map(|k| angles.iter().map(|t| 2.0 * (k as f64 * t).cos()).sum())
        .collect()
}

/// Trace vectors X of `count` independent draws.
#[derive(Debug, Clone, Serialize)]
pub struct SampleBatch {
    pub spec: GroupSpec,
    pub m: usize,
    pub count: usize,
    pub seed: u64,
    pub stream_id: u32,
    /// Row-major count × m.
    pub xs: Vec<f64>,
}

impl SampleBatch {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.xs[i * self.m..(i + 1) * self.m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.xs.chunks(self.m)
    }

    /// Random-eigenvalue trace Tr Uᵏ of row i, recovered from X.
    pub fn trace(&self, i: usize, k: usize) -> f64 {
        self.row(i)[k - 1] * (k as f64).sqrt() + mean_trace(&self.spec, k, false)
    }

    /// First `m` columns of this batch.
    pub fn truncate_m(&self, m: usize) -> SampleBatch {
        assert!(m >= 1 && m <= self.m);
        let xs = self.rows().flat_map(|r| r[..m].iter().cloned()).collect();
        SampleBatch {
            m,
            xs,
            spec: self.spec.clone(),
            ..*self
        }
    }

    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        self.write_csv_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn write_csv_to<W: Write>(&self, w: &mut csv::Writer<W>) -> Result<()> {
        w.write_record((1..=self.m).map(|k| format!("X{k}")))?;
        for row in self.rows() {
            w.write_record(row.iter().map(|x| format!("{x:.17e}")))?;
        }
        Ok(())
    }

    pub fn sidecar(&self) -> serde_json::Value {
        serde_json::json!({
            "spec": self.spec,
            "m": self.m,
            "count": self.count,
            "seed": self.seed,
            "stream_id": self.stream_id,
            "version": env!("CARGO_PKG_VERSION"),
        })
    }

    pub fn write_sidecar<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.sidecar())?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }
}

/// `count` draws on stream (seed, stream_id); draw i uses its own sub-stream.
pub fn sample_batch_stream(spec: &GroupSpec, m: usize, count: usize, seed: u64, stream_id: u32) -> Result<SampleBatch> {
    if m == 0 || count == 0 {
        return Err(Error::InvalidArgument("m and count must be positive".into()));
    }
    let means: Vec<f64> = (1..=m).map(|k| mean_trace(spec, k, false)).collect();
    let forced: Vec<f64> = (1..=m).map(|k| deterministic_power_sum(spec, k)).collect();
    let mut xs = Vec::with_capacity(count * m);
    for i in 0..count {
        let mut rng = draw_rng(seed, stream_id, i as u32);
        let u = sample_group(spec, &mut rng);
        let traces = u.power_traces(m);
        for k in 0..m {
            xs.push((traces[k] - forced[k] - means[k]) / ((k + 1) as f64).sqrt());
        }
    }
    Ok(SampleBatch {
        spec: spec.clone(),
        m,
        count,
        seed,
        stream_id,
        xs,
    })
}

pub fn sample_batch(spec: &GroupSpec, m: usize, count: usize, seed: u64) -> Result<SampleBatch> {
    sample_batch_stream(spec, m, count, seed, 0)
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

pub fn estimate<I: Iterator<Item = f64>>(values: I) -> Estimate {
    let (mut n, mut mean, mut m2) = (0.0, 0.0, 0.0);
    for x in values {
        n += 1.0;
        let d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    let var = if n > 1.0 { m2 / (n - 1.0) } else { 0.0 };
    Estimate {
        mean,
        stderr: (var / n).sqrt(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EcfPoint {
    pub xi: Vec<f64>,
    pub re: Estimate,
    pub im: Estimate,
}

impl EcfPoint {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.mean, self.im.mean)
    }

    /// Distance to `target` in units of the larger component standard error.
    pub fn z_score(&self, target: Complex64) -> f64 {
        let zr = (self.re.mean - target.re).abs() / self.re.stderr.max(1e-300);
        let zi = (self.im.mean - target.im).abs() / self.im.stderr.max(1e-300);
        if self.re.stderr == 0.0 && self.im.stderr == 0.0 {
            return if (self.value() - target).norm() == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
        }
        zr.max(zi)
    }
}

/// Empirical characteristic function E[exp(i⟨ξ, X⟩)].
pub fn empirical_cf(batch: &SampleBatch, xi: &[f64]) -> EcfPoint {
    assert_eq!(xi.len(), batch.m);
    let phases: Vec<f64> = batch
        .rows()
        .map(|r| r.iter().zip(xi).map(|(x, k)| x * k).sum())
        .collect();
    EcfPoint {
        xi: xi.to_vec(),
        re: estimate(phases.iter().map(|p| p.cos())),
        im: estimate(phases.iter().map(|p| p.sin())),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalMoment {
    pub multiplicities: Vec<(usize, usize)>,
    pub estimate: Estimate,
}

/// E[Π_k X_k^{m_k}].
pub fn x_moment(batch: &SampleBatch, mult: &Multiplicities) -> Estimate {
    estimate(
        batch
            .rows()
            .map(|r| mult.iter().map(|(&k, &p)| r[k - 1].powi(p as i32)).product::<f64>()),
    )
}

/// E[Π_k (Tr Uᵏ)^{m_k}] over the random eigenvalues.
pub fn trace_moment(batch: &SampleBatch, mult: &Multiplicities) -> Estimate {
    estimate((0..batch.count).map(|i| {
        mult.iter()
            .map(|(&k, &p)| batch.trace(i, k).powi(p as i32))
            .product::<f64>()
    }))
}

/// Fraction of rows with some |X_k| > L/2.
pub fn box_tail(batch: &SampleBatch, l: f64) -> Estimate {
    estimate(
        batch
            .rows()
            .map(|r| if r.iter().any(|x| x.abs() > 0.5 * l) { 1.0 } else { 0.0 }),
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalStats {
    pub ecf: Vec<EcfPoint>,
    pub moments: Vec<EmpiricalMoment>,
    pub tail: Estimate,
}

/// ECF on a ξ-grid, all mixed X-moments of weight ≤ 6 over indices ≤ m, and the box tail.
pub fn empirical_stats(batch: &SampleBatch, xi_grid: &[Vec<f64>], l: f64) -> Result<EmpiricalStats> {
    let mut moments = Vec::new();
    for w in 1..=6 {
        for p in crate::moments::partitions(w)? {
            if p.parts[0] > batch.m {
                continue;
            }
            moments.push(EmpiricalMoment {
                multiplicities: p.multiplicities.iter().map(|(&j, &m)| (j, m)).collect(),
                estimate: x_moment(batch, &p.multiplicities),
            });
        }
    }
    Ok(EmpiricalStats {
        ecf: xi_grid.iter().map(|xi| empirical_cf(batch, xi)).collect(),
        moments,
        tail: box_tail(batch, l),
    })
}

/// Two-sample Kolmogorov–Smirnov statistic and asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = (na * nb / (na + nb)).sqrt();
    let lambda = (ne + 0.12 + 0.11 / ne) * d;
    (d, kolmogorov_q(lambda))
}

/// Q_KS(λ) = 2 Σ (−1)^{k−1} e^{−2k²λ²}.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        let term = 2.0 * (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

/// Uniform angle on [0, π).
pub fn uniform_angle<R: Rng>(rng: &mut R) -> f64 {
    rng.random::<f64>() * PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::group_spec;

    #[test]
    fn orthogonal_draws() {
        for (dim, sign) in [
            (1, DetSign::Plus),
            (2, DetSign::Minus),
            (5, DetSign::Plus),
            (6, DetSign::Either),
        ] {
            let u = haar_orthogonal(dim, sign, 11);
            let err = (u.transpose() * &u - DMatrix::identity(dim, dim)).amax();
            assert!(err <= 1e-12);
            let d = u.determinant();
            assert!((d.abs() - 1.0).abs() <= 1e-10);
            match sign {
                DetSign::Plus => assert!(d > 0.0),
                DetSign::Minus => assert!(d < 0.0),
                DetSign::Either => {}
            }
        }
    }

    #[test]
    fn symplectic_draws() {
        for two_n in [2, 4, 8] {
            let u = haar_symplectic(two_n, 5);
            let id = DMatrix::<Complex64>::identity(two_n, two_n);
            assert!((u.adjoint() * &u - id).camax() <= 1e-10);
            let j = symplectic_form(two_n);
            assert!((u.transpose() * &j * &u - j).camax() <= 1e-10);
            let eigs = HaarMatrix::Complex(u).eigenvalues();
            assert!(eigs.iter().all(|z| (z.norm() - 1.0).abs() < 1e-9));
        }
    }

    #[test]
    fn rotation_angles() {
        let spec = group_spec(GroupKind::OOddPlus, 1).unwrap();
        let t: f64 = 0.7;
        let rot = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, t.cos(), -t.sin(), 0.0, t.sin(), t.cos()]);
        let angles = eigenangles(&HaarMatrix::Real(rot), &spec).unwrap();
        assert_eq!(angles.len(), 1);
        assert!((angles[0] - t).abs() < 1e-12);
        // a rotation about the axis by π/2 gives X₁ = 1
        let tr = traces_from_angles(&[PI / 2.0], 1)[0];
        assert!((tr - mean_trace(&spec, 1, false) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn even_minus_has_one_angle() {
        let spec = group_spec(GroupKind::OEvenMinus, 2).unwrap();
        let u = sample_group(&spec, &mut draw_rng(3, 0, 0));
        assert_eq!(eigenangles(&u, &spec).unwrap().len(), 1);
        let wrong = group_spec(GroupKind::OEvenPlus, 2).unwrap();
        let v = sample_group(&wrong, &mut draw_rng(3, 0, 0));
        // a generic det +1 matrix has no forced eigenvalues to remove
        assert!(eigenangles(&v, &spec).is_err());
    }

    #[test]
    fn angle_zero_pair_is_kept() {
        let spec = group_spec(GroupKind::OOddPlus, 1).unwrap();
        let angles = eigenangles(&HaarMatrix::Real(DMatrix::identity(3, 3)), &spec).unwrap();
        assert_eq!(angles, vec![0.0]);
    }

    #[test]
    fn batches_are_deterministic() {
        let spec = group_spec(GroupKind::Sp, 2).unwrap();
        let a = sample_batch(&spec, 3, 20, 9).unwrap();
        let b = sample_batch(&spec, 3, 20, 9).unwrap();
        assert_eq!(a.xs, b.xs);
        let c = sample_batch(&spec, 3, 20, 10).unwrap();
        assert_ne!(a.xs, c.xs);
    }

    #[test]
    fn ecf_at_origin_is_one() {
        let spec = group_spec(GroupKind::OEvenPlus, 2).unwrap();
        let b = sample_batch(&spec, 2, 50, 1).unwrap();
        let p = empirical_cf(&b, &[0.0, 0.0]);
        assert_eq!(p.value(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn ks_identical_samples() {
        let a: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let (d, p) = ks_two_sample(&a, &a);
        assert_eq!(d, 0.0);
        assert!(p > 0.99);
        let b: Vec<f64> = (0..100).map(|i| i as f64 + 1000.0).collect();
        assert!(ks_two_sample(&a, &b).1 < 1e-10);
    }
}
