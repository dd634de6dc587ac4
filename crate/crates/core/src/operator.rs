//! Operator means of symmetric positive-definite matrices.
//!
//! A mean with representing function `g` is evaluated as
//! `A^{1/2} g(A^{-1/2} B A^{-1/2}) A^{1/2}`, where `g` acts on the spectrum of
//! the congruence `A^{-1/2} B A^{-1/2}`. Every matrix returned from the
//! functional calculus is symmetrized entrywise, so it is exactly symmetric.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::chain::ChainReport;
use crate::error::{Error, Result};
use crate::means::{geom_raw, lerp, log_mean_unit, mean_chain_log, PositivePair, Weight, H_SWITCH};

/// Relative asymmetry accepted when constructing an [`SpdMatrix`].
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Default Loewner tolerance, relative to the sum of spectral norms.
pub const LOEWNER_TOL: f64 = 1e-10;

/// Relative tolerance of [`helper_ineq_check`].
pub const HELPER_TOL: f64 = 1e-12;

const EIGEN_EPS: f64 = f64::EPSILON;
const EIGEN_MAX_ITER: usize = 10_000;

/// Wire format of a matrix: `{"dim": n, "rows": [[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub rows: Vec<Vec<f64>>,
}

impl From<&DMatrix<f64>> for MatrixJson {
    fn from(m: &DMatrix<f64>) -> Self {
        Self {
            dim: m.nrows(),
            rows: m.row_iter().map(|r| r.iter().copied().collect()).collect(),
        }
    }
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<DMatrix<f64>> {
        if self.rows.len() != self.dim {
            return Err(Error::NotSquare {
                rows: self.rows.len(),
                cols: self.dim,
            });
        }
        for row in &self.rows {
            if row.len() != self.dim {
                return Err(Error::NotSquare {
                    rows: self.dim,
                    cols: row.len(),
                });
            }
        }
        Ok(DMatrix::from_fn(self.dim, self.dim, |i, j| self.rows[i][j]))
    }
}

/// A symmetric positive-definite matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct SpdMatrix(DMatrix<f64>);

impl TryFrom<MatrixJson> for SpdMatrix {
    type Error = Error;

    fn try_from(m: MatrixJson) -> Result<Self> {
        SpdMatrix::new(m.to_matrix()?)
    }
}

impl From<SpdMatrix> for MatrixJson {
    fn from(m: SpdMatrix) -> Self {
        MatrixJson::from(&m.0)
    }
}

impl SpdMatrix {
    /// Validates squareness, symmetry (to [`SYMMETRY_TOL`] relative to the
    /// largest entry) and positive definiteness. The stored matrix is the
    /// symmetric part of `m`.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::NotSquare { rows: 0, cols: 0 });
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteMatrix);
        }
        let largest = m.amax();
        let asymmetry = (&m - m.transpose()).amax();
        if asymmetry > SYMMETRY_TOL * largest {
            return Err(Error::NotSymmetric { asymmetry });
        }
        let s = symmetrize(&m);
        let min_eig = eigen(&s)?.eigenvalues.min();
        if !(min_eig > 0.0) {
            return Err(Error::NotPositiveDefinite { min_eig });
        }
        Ok(Self(s))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::try_from(MatrixJson {
            dim: rows.len(),
            rows: rows.to_vec(),
        })
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(entries)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(&self.0 * c)
    }
}

/// Both operands of a two-argument operator mean: `{"A": ..., "B": ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixPair {
    #[serde(rename = "A")]
    pub a: SpdMatrix,
    #[serde(rename = "B")]
    pub b: SpdMatrix,
}

/// `(M + Mᵀ) / 2`, exactly symmetric.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
}

fn eigen(m: &DMatrix<f64>) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    SymmetricEigen::try_new(m.clone(), EIGEN_EPS, EIGEN_MAX_ITER).ok_or(Error::EigenFailure)
}

fn check_dims(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<()> {
    if x.shape() != y.shape() {
        return Err(Error::DimensionMismatch {
            left: x.nrows(),
            right: y.nrows(),
        });
    }
    if x.nrows() != x.ncols() {
        return Err(Error::NotSquare {
            rows: x.nrows(),
            cols: x.ncols(),
        });
    }
    Ok(())
}

fn apply_spectrum<G: Fn(f64) -> f64>(values: &DVector<f64>, g: G) -> Result<DVector<f64>> {
    let mapped = values.map(&g);
    if let Some((i, _)) = mapped.iter().enumerate().find(|(_, y)| !y.is_finite()) {
        return Err(Error::SpectralFunctionUndefined(values[i]));
    }
    Ok(mapped)
}

/// `U g(Λ) Uᵀ` for a symmetric `A = U Λ Uᵀ`.
pub fn fn_calculus<G: Fn(f64) -> f64>(a: &DMatrix<f64>, g: G) -> Result<DMatrix<f64>> {
    let e = eigen(&symmetrize(a))?;
    let mapped = apply_spectrum(&e.eigenvalues, g)?;
    let u = &e.eigenvectors;
    Ok(symmetrize(&(u * DMatrix::from_diagonal(&mapped) * u.transpose())))
}

/// The spectral data shared by every mean of a fixed pair `(A, B)`.
struct Congruence {
    /// `A^{1/2} U`, where `A^{-1/2} B A^{-1/2} = U Λ Uᵀ`.
    frame: DMatrix<f64>,
    spectrum: DVector<f64>,
}

impl Congruence {
    fn new(a: &SpdMatrix, b: &SpdMatrix) -> Result<Self> {
        check_dims(a.matrix(), b.matrix())?;
        let ea = eigen(a.matrix())?;
        let ua = &ea.eigenvectors;
        let sqrt = apply_spectrum(&ea.eigenvalues, f64::sqrt)?;
        let inv_sqrt = sqrt.map(|s| 1.0 / s);
        let sqrt_a = symmetrize(&(ua * DMatrix::from_diagonal(&sqrt) * ua.transpose()));
        let inv_sqrt_a = symmetrize(&(ua * DMatrix::from_diagonal(&inv_sqrt) * ua.transpose()));
        let c = symmetrize(&(&inv_sqrt_a * b.matrix() * &inv_sqrt_a));
        let ec = eigen(&c)?;
        Ok(Self {
            frame: sqrt_a * ec.eigenvectors,
            spectrum: ec.eigenvalues,
        })
    }

    fn mean<G: Fn(f64) -> f64>(&self, g: G) -> Result<DMatrix<f64>> {
        let mapped = apply_spectrum(&self.spectrum, g)?;
        let scaled = DMatrix::from_fn(self.frame.nrows(), self.frame.ncols(), |i, j| {
            self.frame[(i, j)] * mapped[j]
        });
        Ok(symmetrize(&(scaled * self.frame.transpose())))
    }

    fn geom(&self, w: Weight) -> Result<DMatrix<f64>> {
        self.mean(|t| geom_raw(1.0, t, w))
    }

    fn log_mean(&self, w: Weight) -> Result<DMatrix<f64>> {
        self.mean(|t| log_mean_unit(t, w))
    }
}

fn checked_spd(m: DMatrix<f64>) -> Result<SpdMatrix> {
    SpdMatrix::new(m)
}

/// `A ♯_v B = A^{1/2} (A^{-1/2} B A^{-1/2})^v A^{1/2}`.
pub fn op_weighted_geom(a: &SpdMatrix, b: &SpdMatrix, w: Weight) -> Result<SpdMatrix> {
    check_dims(a.matrix(), b.matrix())?;
    if w.value() == 0.0 {
        return Ok(a.clone());
    }
    if w.complement() == 0.0 {
        return Ok(b.clone());
    }
    checked_spd(Congruence::new(a, b)?.geom(w)?)
}

/// `A ∇_v B = (1 - v) A + v B`.
pub fn op_weighted_arith(a: &SpdMatrix, b: &SpdMatrix, w: Weight) -> Result<SpdMatrix> {
    check_dims(a.matrix(), b.matrix())?;
    Ok(SpdMatrix(arith_matrix(a.matrix(), b.matrix(), w)))
}

fn arith_matrix(a: &DMatrix<f64>, b: &DMatrix<f64>, w: Weight) -> DMatrix<f64> {
    a.zip_map(b, |x, y| lerp(x, y, w))
}

/// The weighted logarithmic operator mean, generated by `t ↦ L_v(1, t)`.
pub fn op_weighted_log(a: &SpdMatrix, b: &SpdMatrix, w: Weight) -> Result<SpdMatrix> {
    check_dims(a.matrix(), b.matrix())?;
    if w.value() == 0.0 {
        return Ok(a.clone());
    }
    if w.complement() == 0.0 {
        return Ok(b.clone());
    }
    checked_spd(Congruence::new(a, b)?.log_mean(w)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoewnerVerdict {
    pub min_eig_of_difference: f64,
    /// Absolute threshold: the relative tolerance times `‖X‖₂ + ‖Y‖₂`.
    pub tol_used: f64,
    pub holds: bool,
}

impl LoewnerVerdict {
    /// Smallest eigenvalue of the difference, normalized by the threshold's
    /// norm scale.
    pub fn relative_margin(&self, tol: f64) -> f64 {
        if self.tol_used > 0.0 {
            self.min_eig_of_difference * tol / self.tol_used
        } else {
            self.min_eig_of_difference
        }
    }
}

fn spectral_norm_sym(m: &DMatrix<f64>) -> Result<f64> {
    Ok(eigen(m)?.eigenvalues.amax())
}

/// Does `X ⪯ Y` hold, i.e. is `Y - X` positive semidefinite up to
/// `tol (‖X‖₂ + ‖Y‖₂)`?
pub fn loewner_leq(x: &DMatrix<f64>, y: &DMatrix<f64>, tol: f64) -> Result<LoewnerVerdict> {
    check_dims(x, y)?;
    let diff = symmetrize(&(y - x));
    let min_eig = eigen(&diff)?.eigenvalues.min();
    let scale = spectral_norm_sym(&symmetrize(x))? + spectral_norm_sym(&symmetrize(y))?;
    let tol_used = tol * scale;
    Ok(LoewnerVerdict {
        min_eig_of_difference: min_eig,
        tol_used,
        holds: min_eig >= -tol_used,
    })
}

pub const OP_CHAIN_LABELS: [&str; 5] = [
    "geometric",
    "geometric_split",
    "log_mean",
    "arith_geom_average",
    "arithmetic",
];

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorChainReport {
    pub labels: Vec<String>,
    pub terms: Vec<DMatrix<f64>>,
    pub verdicts: Vec<LoewnerVerdict>,
    pub pass: bool,
}

#[derive(Serialize)]
struct OperatorChainJson<'a> {
    labels: &'a [String],
    terms: Vec<MatrixJson>,
    verdicts: &'a [LoewnerVerdict],
    pass: bool,
}

impl Serialize for OperatorChainReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OperatorChainJson {
            labels: &self.labels,
            terms: self.terms.iter().map(MatrixJson::from).collect(),
            verdicts: &self.verdicts,
            pass: self.pass,
        }
        .serialize(s)
    }
}

/// `A♯_vB ⪯ (1-v)A♯_{v/2}B + vA♯_{(1+v)/2}B ⪯ Aℓ_vB ⪯ (A♯_vB + A∇_vB)/2 ⪯ A∇_vB`.
pub fn op_chain(a: &SpdMatrix, b: &SpdMatrix, w: Weight, tol: f64) -> Result<OperatorChainReport> {
    check_dims(a.matrix(), b.matrix())?;
    if !w.is_interior() {
        return Err(Error::InvalidWeight(w.value()));
    }
    let cong = Congruence::new(a, b)?;
    let geo = cong.geom(w)?;
    let split = cong
        .geom(w.halved())?
        .zip_map(&cong.geom(w.halved_upper())?, |x, y| lerp(x, y, w));
    let log = cong.log_mean(w)?;
    let ari = arith_matrix(a.matrix(), b.matrix(), w);
    let avg = geo.zip_map(&ari, |x, y| 0.5 * (x + y));
    let terms = vec![geo, split, log, avg, ari];
    let verdicts = terms
        .windows(2)
        .map(|pair| loewner_leq(&pair[0], &pair[1], tol))
        .collect::<Result<Vec<_>>>()?;
    let pass = verdicts.iter().all(|v| v.holds);
    Ok(OperatorChainReport {
        labels: OP_CHAIN_LABELS.iter().map(|s| s.to_string()).collect(),
        terms,
        verdicts,
        pass,
    })
}

/// The scalar chain of representing functions
/// `t^v <= (1-v)t^{v/2} + v t^{(1+v)/2} <= L_v(1,t) <= (t^v + (1-v) + vt)/2 <= (1-v) + vt`.
pub fn representing_chain(t: f64, w: Weight) -> Result<ChainReport> {
    Ok(mean_chain_log(PositivePair::new(1.0, t)?, w))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HelperCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// `(x² - 1) / log x² >= x` for `x > 0`, with equality in the limit `x = 1`.
pub fn helper_ineq_check(x: f64) -> Result<HelperCheck> {
    crate::means::check_positive("x", x)?;
    let h = 2.0 * x.ln();
    let lhs = if h.abs() < H_SWITCH {
        1.0 + h / 2.0 + h * h / 6.0
    } else {
        h.exp_m1() / h
    };
    Ok(HelperCheck {
        lhs,
        rhs: x,
        pass: lhs >= x * (1.0 - HELPER_TOL),
    })
}
