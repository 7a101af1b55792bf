//! Symplectic phase-space primitives.
//!
//! A phase space with `s` modes is ℝ^{2s} with coordinates interleaved per mode
//! as (q₁, p₁, …, q_s, p_s). The canonical commutation form is the
//! block-diagonal matrix Δ = diag(J, …, J) with J = [[0, 1], [−1, 0]].
//!
//! Transfer matrices act on row vectors of canonical observables, R′ = R·T, so
//! a map between spaces carrying forms Δ_in (rows) and Δ_out (columns) is
//! symplectic when Tᵗ·Δ_in·T = Δ_out.
//!
//! Covariance matrices α are analyzed through the spectrum of Δ⁻¹α: for a
//! positive-semidefinite α the eigenvalues pair as ±iν_j with ν_j ≥ 0, and the
//! ν_j (the symplectic eigenvalues) drive every entropy formula downstream.

use nalgebra::{Complex, DMatrix, DVector};
use thiserror::Error;

use crate::{DEFAULT_TOL, PAIRING_TOL};

#[derive(Debug, Error)]
pub enum SymplecticError {
    #[error("matrix is {0}×{1}, expected square with even dimension")]
    BadShape(usize, usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not symmetric (max asymmetry {0:.3e})")]
    NotSymmetric(f64),
    #[error("matrix is not skew-symmetric (max residual {0:.3e})")]
    NotSkewSymmetric(f64),
    #[error("skew form is degenerate (best remaining pivot {0:.3e})")]
    DegenerateForm(f64),
    #[error(
        "eigenvalues of Δ⁻¹α do not pair as ±iν (residual {0:.3e}); \
         the matrix is far from a positive covariance"
    )]
    PairingFailure(f64),
    #[error("columns are not isotropic (max |uᵢᵗΔuⱼ| = {0:.3e})")]
    NotIsotropic(f64),
    #[error("column set has numerical rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
}

pub type Result<T> = std::result::Result<T, SymplecticError>;

/// Canonical symplectic form on `modes` modes: diag(J, …, J), J = [[0, 1], [−1, 0]].
pub fn canonical_form(modes: usize) -> DMatrix<f64> {
    let mut form = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        form[(2 * k, 2 * k + 1)] = 1.0;
        form[(2 * k + 1, 2 * k)] = -1.0;
    }
    form
}

/// A phase space: mode count plus its (canonical) symplectic form.
///
/// Direct sums stay canonical because diag(Δ_a, Δ_b) of canonical blocks is
/// again block-diagonal in J, so composite spaces are built with
/// `SymplecticSpace::new(s_a + s_b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSpace {
    modes: usize,
    form: DMatrix<f64>,
}

impl SymplecticSpace {
    pub fn new(modes: usize) -> Self {
        Self {
            modes,
            form: canonical_form(modes),
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Phase-space dimension 2s.
    pub fn dim(&self) -> usize {
        2 * self.modes
    }

    pub fn form(&self) -> &DMatrix<f64> {
        &self.form
    }

    /// Δ⁻¹. The canonical form satisfies Δ² = −I, so the inverse is −Δ.
    pub fn form_inverse(&self) -> DMatrix<f64> {
        -&self.form
    }
}

/// Max absolute entry, 0 for empty matrices (`amax` panics on those).
pub(crate) fn max_abs(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        0.0
    } else {
        m.amax()
    }
}

/// ‖Tᵗ·Δ_in·T − Δ_out‖_max.
pub fn symplectic_residual(
    t: &DMatrix<f64>,
    input: &SymplecticSpace,
    output: &SymplecticSpace,
) -> Result<f64> {
    if t.nrows() != input.dim() {
        return Err(SymplecticError::DimensionMismatch {
            expected: input.dim(),
            got: t.nrows(),
        });
    }
    if t.ncols() != output.dim() {
        return Err(SymplecticError::DimensionMismatch {
            expected: output.dim(),
            got: t.ncols(),
        });
    }
    Ok(max_abs(&(t.transpose() * input.form() * t - output.form())))
}

/// Whether T maps `input` to `output` symplectically, within `tol` on the
/// max-norm residual of Tᵗ·Δ_in·T − Δ_out.
pub fn is_symplectic(
    t: &DMatrix<f64>,
    input: &SymplecticSpace,
    output: &SymplecticSpace,
    tol: f64,
) -> Result<bool> {
    Ok(symplectic_residual(t, input, output)? <= tol)
}

/// Symplectic eigenvalues of a symmetric matrix `alpha` on `space`, sorted
/// descending; one entry per ±iν pair of the spectrum of Δ⁻¹α.
///
/// Fails with [`SymplecticError::PairingFailure`] when the spectrum is not
/// purely imaginary up to a relative tolerance — the signature of a matrix far
/// from positive semidefinite (e.g. diag(1, −1) has real eigenvalue pairs).
pub fn symplectic_eigenvalues(alpha: &DMatrix<f64>, space: &SymplecticSpace) -> Result<Vec<f64>> {
    if alpha.nrows() != space.dim() || alpha.ncols() != space.dim() {
        return Err(SymplecticError::DimensionMismatch {
            expected: space.dim(),
            got: alpha.nrows().max(alpha.ncols()),
        });
    }
    let asym = max_abs(&(alpha - alpha.transpose()));
    if asym > DEFAULT_TOL * max_abs(alpha).max(1.0) {
        return Err(SymplecticError::NotSymmetric(asym));
    }

    let eigs: DVector<Complex<f64>> = (space.form_inverse() * alpha).complex_eigenvalues();
    let scale = eigs.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
    let worst_real = eigs.iter().map(|z| z.re.abs()).fold(0.0_f64, f64::max);
    if worst_real > PAIRING_TOL * scale {
        return Err(SymplecticError::PairingFailure(worst_real));
    }

    let mut moduli: Vec<f64> = eigs.iter().map(|z| z.im.abs()).collect();
    moduli.sort_by(|a, b| b.total_cmp(a));
    let mut nus = Vec::with_capacity(space.modes());
    for k in 0..space.modes() {
        let (hi, lo) = (moduli[2 * k], moduli[2 * k + 1]);
        if hi - lo > PAIRING_TOL * scale {
            return Err(SymplecticError::PairingFailure(hi - lo));
        }
        nus.push(0.5 * (hi + lo));
    }
    Ok(nus)
}

/// Smallest eigenvalue of the Hermitian matrix A + iB, for real symmetric A
/// and real skew-symmetric B, via the real symmetric embedding
/// [[A, −B], [B, A]] (whose spectrum is that of A + iB, doubled).
pub fn hermitian_min_eigenvalue(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    assert_eq!(a.ncols(), n, "A must be square");
    assert_eq!((b.nrows(), b.ncols()), (n, n), "B must match A");
    if n == 0 {
        return 0.0;
    }
    let mut embed = DMatrix::zeros(2 * n, 2 * n);
    embed.view_mut((0, 0), (n, n)).copy_from(a);
    embed.view_mut((n, n), (n, n)).copy_from(a);
    embed.view_mut((0, n), (n, n)).copy_from(&(-b));
    embed.view_mut((n, 0), (n, n)).copy_from(b);
    embed.symmetric_eigenvalues().min()
}

/// Basis change S with Sᵗ·M·S = Δ (canonical) for a nondegenerate
/// skew-symmetric M.
///
/// Symplectic Gram–Schmidt with greedy pivoting: each step picks the remaining
/// candidate pair (u, v) maximizing |uᵗMv|, scales it into a canonical plane,
/// and projects the other candidates onto the M-orthogonal complement.
pub fn canonicalize_skew(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    if m.ncols() != n || !n.is_multiple_of(2) {
        return Err(SymplecticError::BadShape(m.nrows(), m.ncols()));
    }
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let scale = max_abs(m).max(1.0);
    let skew_res = max_abs(&(m + m.transpose()));
    if skew_res > DEFAULT_TOL * scale {
        return Err(SymplecticError::NotSkewSymmetric(skew_res));
    }

    let mut candidates: Vec<DVector<f64>> = (0..n)
        .map(|i| DVector::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 }))
        .collect();
    let mut columns: Vec<DVector<f64>> = Vec::with_capacity(n);

    while !candidates.is_empty() {
        // Greedy pivot: largest |uᵗMv| over remaining candidate pairs.
        let mut best = (0usize, 1usize, 0.0_f64);
        for i in 0..candidates.len() {
            let mu = m * &candidates[i];
            for (j, cand) in candidates.iter().enumerate().skip(i + 1) {
                let p = cand.dot(&mu);
                if p.abs() > best.2.abs() {
                    best = (i, j, p);
                }
            }
        }
        let (i, j, pivot) = best;
        if pivot.abs() <= DEFAULT_TOL * scale {
            return Err(SymplecticError::DegenerateForm(pivot.abs()));
        }

        // candidates[i]ᵗ M candidates[j] = −pivot with the dot-product order
        // above, so swap roles to make aᵗMb positive before scaling.
        let (u, v) = if pivot > 0.0 { (j, i) } else { (i, j) };
        let root = pivot.abs().sqrt();
        let a = &candidates[u] / root;
        let b = &candidates[v] / root;

        let (lo, hi) = (u.min(v), u.max(v));
        candidates.swap_remove(hi);
        candidates.swap_remove(lo);

        // Project the rest onto the M-orthogonal complement of span{a, b}:
        // w ← w + (bᵗMw)·a − (aᵗMw)·b zeroes both aᵗMw′ and bᵗMw′.
        // With M skew, (Ma)ᵗw = −aᵗMw, hence the sign flips below.
        let ma = m * &a;
        let mb = m * &b;
        for w in candidates.iter_mut() {
            let a_m_w = -ma.dot(w);
            let b_m_w = -mb.dot(w);
            *w += &a * b_m_w - &b * a_m_w;
        }
        columns.push(a);
        columns.push(b);
    }

    Ok(DMatrix::from_columns(&columns))
}

/// Symplectic basis adapted to an isotropic subspace: `e` spans the subspace
/// (orthonormal columns), `h` holds dual partners with eᵢᵗΔhⱼ = δᵢⱼ and the h
/// block isotropic, and `g` spans the symplectic complement of span(e, h) in
/// canonical form (gᵗΔg is again block-J).
#[derive(Debug, Clone)]
pub struct SymplecticBasisSplit {
    pub e: DMatrix<f64>,
    pub h: DMatrix<f64>,
    pub g: DMatrix<f64>,
}

impl SymplecticBasisSplit {
    /// Number of isotropic directions k.
    pub fn isotropic_rank(&self) -> usize {
        self.e.ncols()
    }

    /// The full basis-change matrix P = [e | h | g].
    pub fn adapted_matrix(&self) -> DMatrix<f64> {
        let dim = self.e.nrows();
        let k = self.e.ncols();
        let mut p = DMatrix::zeros(dim, dim);
        p.view_mut((0, 0), (dim, k)).copy_from(&self.e);
        p.view_mut((0, k), (dim, k)).copy_from(&self.h);
        p.view_mut((0, 2 * k), (dim, dim - 2 * k))
            .copy_from(&self.g);
        p
    }
}

/// Completes a spanning set of an isotropic subspace into an adapted
/// symplectic basis (e, h, g) of the whole space.
///
/// The input columns are orthonormalized (so `e` spans the same subspace);
/// dual partners solve eⱼᵗΔhᵢ = δᵢⱼ by minimum-norm least squares, corrected
/// inside span(e) to make the h block isotropic; `g` is the Δ-orthogonal
/// complement of span(e, h), canonicalized with [`canonicalize_skew`].
pub fn complete_isotropic_basis(
    n_basis: &DMatrix<f64>,
    space: &SymplecticSpace,
) -> Result<SymplecticBasisSplit> {
    let dim = space.dim();
    if n_basis.nrows() != dim {
        return Err(SymplecticError::DimensionMismatch {
            expected: dim,
            got: n_basis.nrows(),
        });
    }
    let k = n_basis.ncols();
    if 2 * k > dim {
        // An isotropic subspace has at most s = dim/2 dimensions.
        return Err(SymplecticError::NotIsotropic(f64::INFINITY));
    }

    let e = if k == 0 {
        DMatrix::zeros(dim, 0)
    } else {
        let gram = n_basis.transpose() * n_basis;
        let already_orthonormal = max_abs(&(&gram - DMatrix::identity(k, k))) <= 1e-12;
        let mut u = if already_orthonormal {
            // Keep exactly orthonormal inputs bit-for-bit: re-orthonormalizing
            // would inject roundoff that extreme squeezing later amplifies.
            n_basis.clone()
        } else {
            let svd = n_basis.clone().svd(true, false);
            let sv_max = svd.singular_values.max();
            let rank = svd
                .singular_values
                .iter()
                .filter(|&&sv| sv > DEFAULT_TOL * sv_max.max(1.0))
                .count();
            if rank < k {
                return Err(SymplecticError::RankDeficient { rank, expected: k });
            }
            svd.u.expect("svd requested u").columns(0, k).into_owned()
        };
        // Column signs are otherwise arbitrary; pin them (largest entry
        // positive) so repeated runs produce identical bases.
        for j in 0..k {
            let mut col = u.column_mut(j);
            let lead = col.iter().cloned().fold(
                0.0_f64,
                |acc, x| {
                    if x.abs() > acc.abs() {
                        x
                    } else {
                        acc
                    }
                },
            );
            if lead < 0.0 {
                col.neg_mut();
            }
        }
        u
    };

    let iso = max_abs(&(e.transpose() * space.form() * &e));
    if iso > DEFAULT_TOL {
        return Err(SymplecticError::NotIsotropic(iso));
    }

    let h = if k == 0 {
        DMatrix::zeros(dim, 0)
    } else {
        // Minimum-norm solution of (eᵗΔ)·h = I: because Δ is orthogonal and
        // e orthonormal, the pseudo-inverse of eᵗΔ is simply Δᵗe.
        let h0 = space.form().transpose() * &e;
        // h0 pairs correctly with e but need not be isotropic itself; adding
        // e·(A/2) with A = h0ᵗΔh0 cancels the skew defect without touching
        // the pairing (eᵗΔe = 0).
        let defect = h0.transpose() * space.form() * &h0;
        &h0 + &e * (defect * 0.5)
    };

    let g = if 2 * k == dim {
        DMatrix::zeros(dim, 0)
    } else if k == 0 {
        canonicalize_skew(space.form())?
    } else {
        // Kernel of W = [e h]ᵗΔ via the symmetric eigenproblem of WᵗW: the
        // eigenvectors for the (dim − 2k) vanishing eigenvalues span the
        // Δ-orthogonal complement of span(e, h).
        let mut w = DMatrix::zeros(2 * k, dim);
        w.view_mut((0, 0), (k, dim))
            .copy_from(&(e.transpose() * space.form()));
        w.view_mut((k, 0), (k, dim))
            .copy_from(&(h.transpose() * space.form()));
        let gram = w.transpose() * &w;
        let eig = gram.symmetric_eigen();
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let cols: Vec<DVector<f64>> = order[..dim - 2 * k]
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect();
        let g0 = DMatrix::from_columns(&cols);
        let restricted = g0.transpose() * space.form() * &g0;
        &g0 * canonicalize_skew(&restricted)?
    };

    Ok(SymplecticBasisSplit { e, h, g })
}
