//! Bilinear pairings: the trace form `⟨x, y⟩ = Σ x_ij y_ij = tr(x y^t)` on
//! matrices, its tensor extension, the map/state pairing `⟨φ, z⟩ =
//! ⟨C_φ, z⟩`, the `Θ`-twisted families `⟨φ, z⟩_Θ = ⟨φ, Θ⁻¹(z)⟩`, the
//! map-space form `⟨φ, ψ⟩ = ⟨C_φ, C_ψ⟩`, and superoperator duals.
//!
//! All forms are bilinear, never sesquilinear: no entry is conjugated.

use crate::error::{Error, Result};
use crate::mapspace::LinearMap;
use crate::matlin::{ComplexMatrix, LuFactors, TensorMatrix};
use crate::transforms::SuperOp;
use crate::{C64, ToleranceProfile};

/// `Σ_{ij} x_ij y_ij`, no conjugation.
pub fn trace_pair(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<C64> {
    if x.rows() != y.rows() || x.cols() != y.cols() {
        return Err(Error::DimMismatch {
            context: "trace pairing needs equal shapes",
        });
    }
    Ok(x.entries()
        .iter()
        .zip(y.entries())
        .map(|(a, b)| a * b)
        .sum())
}

/// The tensor-space pairing, same formula on the underlying matrices.
pub fn tensor_pair(z1: &TensorMatrix, z2: &TensorMatrix) -> Result<C64> {
    if z1.m() != z2.m() || z1.n() != z2.n() {
        return Err(Error::DimMismatch {
            context: "tensor pairing needs equal factor dimensions",
        });
    }
    trace_pair(z1.mat(), z2.mat())
}

/// `⟨φ, z⟩ = ⟨C_φ, z⟩`; on a product `z = x ⊗ y` this equals `⟨φ(x), y⟩`.
pub fn map_state_pair(phi: &LinearMap, z: &TensorMatrix) -> Result<C64> {
    if phi.m() != z.m() || phi.n() != z.n() {
        return Err(Error::DimMismatch {
            context: "map and state dimensions must agree",
        });
    }
    trace_pair(phi.choi().mat(), z.mat())
}

/// The twisted pairing `⟨φ, z⟩_Θ = ⟨φ, Θ⁻¹(z)⟩`.
pub fn map_state_pair_theta(theta: &SuperOp, phi: &LinearMap, z: &TensorMatrix) -> Result<C64> {
    let inv_z = apply_inverse(theta, z)?;
    map_state_pair(phi, &inv_z)
}

/// The map-space form `⟨φ, ψ⟩_Θ = ⟨C_φ, Θ⁻¹(C_ψ)⟩`.
pub fn map_map_pair(phi: &LinearMap, psi: &LinearMap, theta: &SuperOp) -> Result<C64> {
    if phi.m() != psi.m() || phi.n() != psi.n() {
        return Err(Error::DimMismatch {
            context: "both maps must share dimensions",
        });
    }
    let twisted = apply_inverse(theta, psi.choi())?;
    trace_pair(phi.choi().mat(), twisted.mat())
}

/// The dual `Θ*` with `⟨Θ(z₁), z₂⟩ = ⟨z₁, Θ*(z₂)⟩`; its matrix over the
/// matrix-unit basis is the plain transpose of the matrix of `Θ`.
pub fn superop_dual(theta: &SuperOp) -> SuperOp {
    theta.transpose_matrix()
}

/// Checks `Θ₁ ∘ (Θ₂*)⁻¹ = Θ₃` within `tol` in the max norm. When this
/// holds, `⟨Γ^{Θ₂}(φ), z⟩_{Θ₁} = ⟨φ, z⟩_{Θ₃}` for all `φ, z`.
pub fn check_pairing_transform(
    theta1: &SuperOp,
    theta2: &SuperOp,
    theta3: &SuperOp,
    tol: f64,
) -> Result<bool> {
    let dual2 = superop_dual(theta2);
    let inv = dual2.inverse(ToleranceProfile::default().rcond_floor)?;
    let lhs = theta1.compose(&inv)?;
    Ok(lhs.max_diff(theta3) <= tol)
}

fn apply_inverse(theta: &SuperOp, z: &TensorMatrix) -> Result<TensorMatrix> {
    if theta.m() != z.m() || theta.n() != z.n() {
        return Err(Error::DimMismatch {
            context: "superoperator and tensor dimensions must agree",
        });
    }
    let lu = LuFactors::factor(theta.mat())?;
    let rcond = lu.rcond_estimate();
    if rcond < ToleranceProfile::default().rcond_floor {
        return Err(Error::SingularTheta { rcond });
    }
    let d = theta.dim();
    let mut v = alloc::vec![C64::new(0.0, 0.0); d * d];
    for r in 0..d {
        for c in 0..d {
            v[c * d + r] = z.mat().get(r, c);
        }
    }
    let sol = lu.solve_vec(&v)?;
    let mat = ComplexMatrix::from_fn(d, d, |r, c| sol[c * d + r]);
    TensorMatrix::new(theta.m(), theta.n(), mat)
}
