//! Linear symplectic geometry of R^{2n}.
//!
//! Coordinates are ordered (q₁, …, q_n, p₁, …, p_n). The standard complex
//! structure acts as J(q, p) = (−p, q), and the symplectic form is
//! ω(v, u) = ⟨v, Ju⟩, so that ω(e_{p₁}, e_{q₁}) = 1.
//!
//! A matrix S is symplectic when SᵀJS = J; both S ↦ Sᵀ and S ↦ S⁻¹ preserve
//! this property. Symplectic matrices are produced here either through the
//! Cayley transform of a symmetric matrix or by completing a prescribed pair
//! of vectors to a symplectic basis.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};

/// Default entrywise tolerance for membership in Sp(2n).
pub const SP_TOL: f64 = 1e-9;

/// Checks that `dim` is a valid phase space dimension (even, positive).
pub fn check_even_dim(dim: usize) -> Result<()> {
    if dim == 0 || !dim.is_multiple_of(2) {
        return Err(Error::OddDimension(dim));
    }
    Ok(())
}

/// The matrix of J in coordinates (q, p): J = [[0, −I], [I, 0]].
pub fn j_matrix(dim: usize) -> DMatrix<f64> {
    let n = dim / 2;
    let mut j = DMatrix::zeros(dim, dim);
    for i in 0..n {
        j[(i, n + i)] = -1.0;
        j[(n + i, i)] = 1.0;
    }
    j
}

/// J(q, p) = (−p, q).
pub fn apply_j(x: &DVector<f64>) -> DVector<f64> {
    let n = x.len() / 2;
    let mut out = DVector::zeros(x.len());
    for i in 0..n {
        out[i] = -x[n + i];
        out[n + i] = x[i];
    }
    out
}

/// ω(v, u) = ⟨v, Ju⟩, evaluated without allocating Ju.
pub fn omega(v: &DVector<f64>, u: &DVector<f64>) -> f64 {
    let n = v.len() / 2;
    let mut acc = 0.0;
    for i in 0..n {
        acc += v[n + i] * u[i] - v[i] * u[n + i];
    }
    acc
}

/// Max-norm of SᵀJS − J.
pub fn symplectic_residual(s: &DMatrix<f64>) -> f64 {
    let j = j_matrix(s.nrows());
    let lhs = s.transpose() * &j * s;
    (lhs - j).amax()
}

pub fn is_symplectic(s: &DMatrix<f64>, tol: f64) -> bool {
    s.is_square() && s.nrows().is_multiple_of(2) && symplectic_residual(s) <= tol
}

/// An affine symplectic map x ↦ Lx + t with L ∈ Sp(2n).
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMap {
    linear: DMatrix<f64>,
    translation: DVector<f64>,
}

impl SymplecticMap {
    /// Validates LᵀJL = J within `SP_TOL`.
    pub fn new(linear: DMatrix<f64>, translation: DVector<f64>) -> Result<Self> {
        Self::with_tol(linear, translation, SP_TOL)
    }

    pub fn with_tol(linear: DMatrix<f64>, translation: DVector<f64>, tol: f64) -> Result<Self> {
        check_even_dim(linear.nrows())?;
        if !linear.is_square() || linear.nrows() != translation.len() {
            return Err(Error::DimensionMismatch {
                expected: linear.nrows(),
                got: translation.len(),
            });
        }
        let residual = symplectic_residual(&linear);
        if residual > tol {
            return Err(Error::NotSymplectic { residual, tol });
        }
        Ok(Self {
            linear,
            translation,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            linear: DMatrix::identity(dim, dim),
            translation: DVector::zeros(dim),
        }
    }

    pub fn linear_part(linear: DMatrix<f64>) -> Result<Self> {
        let t = DVector::zeros(linear.nrows());
        Self::new(linear, t)
    }

    pub fn dim(&self) -> usize {
        self.linear.nrows()
    }

    pub fn linear(&self) -> &DMatrix<f64> {
        &self.linear
    }

    pub fn translation(&self) -> &DVector<f64> {
        &self.translation
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.linear * x + &self.translation
    }

    /// Composition (self ∘ other): x ↦ L₁(L₂x + t₂) + t₁.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            linear: &self.linear * &other.linear,
            translation: &self.linear * &other.translation + &self.translation,
        }
    }
}

/// Cayley transform S = (I − JM/2)⁻¹ (I + JM/2) of a symmetric M.
///
/// JM is Hamiltonian for symmetric M, so S is symplectic whenever I − JM/2
/// is invertible. The chart covers a neighborhood of the identity and is the
/// parametrization used by the shadow searches.
pub fn cayley(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_even_dim(m.nrows())?;
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    let sym_residual = (m - m.transpose()).amax();
    let scale = m.amax().max(1.0);
    if sym_residual > 1e-10 * scale {
        return Err(Error::Domain(format!(
            "Cayley parameter must be symmetric (residual {sym_residual:.3e})"
        )));
    }
    let dim = m.nrows();
    let jm = j_matrix(dim) * m;
    let a = DMatrix::identity(dim, dim) - 0.5 * &jm;
    let b = DMatrix::identity(dim, dim) + 0.5 * &jm;
    let lu = a.full_piv_lu();
    let u_diag = lu.u().diagonal();
    let max_piv = u_diag.amax();
    let min_piv = u_diag.iter().fold(f64::INFINITY, |acc, x| acc.min(x.abs()));
    if min_piv.is_nan() || min_piv <= max_piv * 1e-13 {
        return Err(Error::CayleyOutOfDomain);
    }
    lu.solve(&b).ok_or(Error::CayleyOutOfDomain)
}

/// A seeded symplectic matrix: Cayley transform of a random symmetric M with
/// entries uniform in [−scale, scale].
pub fn random_symplectic<R: Rng>(dim: usize, scale: f64, rng: &mut R) -> Result<DMatrix<f64>> {
    check_even_dim(dim)?;
    loop {
        let mut m = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..=i {
                let x: f64 = rng.random_range(-scale..=scale);
                m[(i, j)] = x;
                m[(j, i)] = x;
            }
        }
        match cayley(&m) {
            Ok(s) => return Ok(s),
            Err(Error::CayleyOutOfDomain) => continue,
            Err(e) => return Err(e),
        }
    }
}

/// Result of completing (v, w) to a symplectic matrix.
///
/// `map.linear()ᵀ e_{q₁} = v` and `map.linear()ᵀ J e_{q₁} = sign · w`.
#[derive(Debug, Clone)]
pub struct Completion {
    pub map: SymplecticMap,
    pub sign: f64,
}

/// Completes a pair (v, w) with |ω(w, v)| = 1 to S ∈ Sp(2n).
///
/// The columns of Sᵀ are built by symplectic Gram–Schmidt: the first pair is
/// (v, sign·w), later pairs come from greedily chosen standard basis vectors
/// with earlier pairs projected out. Residual symplecticity is validated
/// against `tol` before returning.
pub fn complete_to_symplectic(v: &DVector<f64>, w: &DVector<f64>, tol: f64) -> Result<Completion> {
    let dim = v.len();
    check_even_dim(dim)?;
    if w.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: w.len(),
        });
    }
    let pairing = omega(w, v);
    if (pairing.abs() - 1.0).abs() > tol.max(1e-12) {
        return Err(Error::DegeneratePairing {
            omega: pairing,
            tol,
        });
    }
    let sign = pairing.signum();
    let n = dim / 2;
    // Pairs (a_k, b_k) with ω(b_k, a_k) = 1 and all other pairings zero.
    let mut a_cols: Vec<DVector<f64>> = vec![v.clone()];
    let mut b_cols: Vec<DVector<f64>> = vec![sign * w];

    // Removes the span of the completed pairs in the symplectic sense.
    let project = |z: &DVector<f64>, a_cols: &[DVector<f64>], b_cols: &[DVector<f64>]| {
        let mut out = z.clone();
        for (a, b) in a_cols.iter().zip(b_cols) {
            let alpha = -omega(&out, b);
            let beta = omega(&out, a);
            out -= alpha * a + beta * b;
        }
        out
    };

    for _ in 1..n {
        let mut best_a: Option<DVector<f64>> = None;
        let mut best_norm = 0.0;
        for k in 0..dim {
            let mut e = DVector::zeros(dim);
            e[k] = 1.0;
            let c = project(&e, &a_cols, &b_cols);
            let norm = c.norm();
            if norm > best_norm {
                best_norm = norm;
                best_a = Some(c);
            }
        }
        let a_new = best_a
            .filter(|_| best_norm > 1e-9)
            .ok_or(Error::RankDeficient {
                context: "completing a symplectic basis",
            })?
            .unscale(best_norm);

        let mut best_b: Option<DVector<f64>> = None;
        let mut best_pair = 0.0f64;
        for k in 0..dim {
            let mut e = DVector::zeros(dim);
            e[k] = 1.0;
            let c = project(&e, &a_cols, &b_cols);
            let pair = omega(&c, &a_new);
            if pair.abs() > best_pair.abs() {
                best_pair = pair;
                best_b = Some(c);
            }
        }
        if best_pair.abs() < 1e-9 {
            return Err(Error::RankDeficient {
                context: "pairing a symplectic basis vector",
            });
        }
        let b_new = best_b.unwrap().unscale(best_pair);
        a_cols.push(a_new);
        b_cols.push(b_new);
    }

    let mut st = DMatrix::zeros(dim, dim);
    for (k, (a, b)) in a_cols.iter().zip(&b_cols).enumerate() {
        st.set_column(k, a);
        st.set_column(n + k, b);
    }
    let s = st.transpose();
    let residual = symplectic_residual(&s);
    if residual > tol.max(SP_TOL) {
        return Err(Error::NotSymplectic {
            residual,
            tol: tol.max(SP_TOL),
        });
    }
    Ok(Completion {
        map: SymplecticMap {
            linear: s,
            translation: DVector::zeros(dim),
        },
        sign,
    })
}
