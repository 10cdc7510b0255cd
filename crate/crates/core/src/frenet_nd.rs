//! Generalized Frenet frame for n-phase trajectories.
//!
//! The frame is built by Gram-Schmidt on the successive derivatives
//! `v, v', v'', ...`. Derivatives that add no new direction are skipped and
//! counted out of the rank. When fewer than `n - 1` directions survive, the
//! frame is completed deterministically:
//!
//! 1. the common-mode direction `(1, ..., 1) / sqrt(n)`, made orthogonal to
//!    the retained vectors, is reserved for the last axis;
//! 2. the canonical basis vectors `e_1, e_2, ...` are orthogonalized in index
//!    order against everything accepted so far until `n - 1` axes exist;
//! 3. the last axis is the Hodge complement of the first `n - 1`, and if a
//!    common-mode direction was reserved the last fill vector is flipped so
//!    that the final axis points along it.
//!
//! For a balanced n-phase set this reproduces the generalized Park matrix:
//! two rotating axes plus the zero-sequence axis.

use crate::error::{Error, Result};
use crate::geometry::{dot, hodge_complement, PhaseVector, SquareMatrix, EPS_ZERO_REL};

/// Default relative Gram-Schmidt residual below which a derivative is
/// treated as dependent on the previous ones.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

// canonical fill vectors with smaller residuals are skipped
const FILL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedFrame {
    pub dim: usize,
    /// Orthonormal axes `f_1 ... f_n`.
    pub vectors: Vec<PhaseVector>,
    /// Generalized curvatures, zero until filled by [`generalized_invariants`].
    pub chi: Vec<f64>,
    /// Generalized frequencies, zero until filled by [`generalized_invariants`].
    pub omega_chi: Vec<f64>,
    /// Number of derivatives that contributed a new direction.
    pub rank: usize,
}

impl GeneralizedFrame {
    /// Rows are the frame axes.
    pub fn matrix(&self) -> SquareMatrix {
        SquareMatrix::from_rows(&self.vectors).expect("square frame")
    }
}

/// Invariants at one interior sample of a frame path.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiSample {
    pub chi: Vec<f64>,
    pub omega_chi: Vec<f64>,
}

fn orthogonalize(mut r: PhaseVector, against: &[PhaseVector]) -> PhaseVector {
    // second pass restores orthogonality lost to cancellation
    for _ in 0..2 {
        for q in against {
            let c = dot(q, &r).expect("same dimension");
            r = r.axpy(-c, q);
        }
    }
    r
}

/// Orthonormal frame from successive derivatives of an n-phase quantity.
///
/// `derivs` holds `v, v', v'', ...` (at most `n` entries). A step whose
/// residual is at most `rank_tol * |derivs[h]|` is dropped from the rank.
pub fn gram_schmidt_frame(derivs: &[PhaseVector], rank_tol: f64) -> Result<GeneralizedFrame> {
    let first = derivs
        .first()
        .ok_or_else(|| Error::InvalidParameter("no derivative vectors given".into()))?;
    let n = first.dim();
    if n < 2 {
        return Err(Error::InvalidVector(format!("need at least 2 phases, got {n}")));
    }
    if derivs.len() > n {
        return Err(Error::InvalidParameter(format!(
            "at most {n} derivative vectors for {n} phases, got {}",
            derivs.len()
        )));
    }
    if !(rank_tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "rank tolerance must be positive, got {rank_tol}"
        )));
    }
    for d in derivs {
        if d.dim() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: d.dim(),
            });
        }
    }
    let first_norm = first.norm();
    if first_norm == 0.0 || first_norm <= EPS_ZERO_REL * first.max_abs() || !first_norm.is_finite() {
        return Err(Error::DegenerateDirection { norm: first_norm });
    }

    let mut retained: Vec<PhaseVector> = Vec::with_capacity(n);
    for d in derivs {
        let r = orthogonalize(d.clone(), &retained);
        let norm = r.norm();
        if norm > rank_tol * d.norm() && norm > 0.0 {
            retained.push(r.scaled(1.0 / norm));
        }
    }
    let rank = retained.len();
    retained.truncate(n - 1);

    let mut vectors = retained;
    let mut reserved = None;
    if vectors.len() < n - 1 {
        let common = PhaseVector::new(vec![1.0 / (n as f64).sqrt(); n])?;
        let p = orthogonalize(common, &vectors);
        let p_norm = p.norm();
        if p_norm > rank_tol {
            reserved = Some(p.scaled(1.0 / p_norm));
        }
        let fill_start = vectors.len();
        for i in 0..n {
            if vectors.len() == n - 1 {
                break;
            }
            let mut against = vectors.clone();
            against.extend(reserved.iter().cloned());
            let r = orthogonalize(PhaseVector::unit(n, i), &against);
            let norm = r.norm();
            if norm > FILL_TOL {
                vectors.push(r.scaled(1.0 / norm));
            }
        }
        debug_assert_eq!(vectors.len(), n - 1);
        let mut last = hodge_complement(&vectors)?
            .normalized()
            .ok_or(Error::RankDeficient { rank, required: n - 1 })?;
        if let Some(p) = &reserved {
            if dot(&last, p)? < 0.0 && vectors.len() > fill_start {
                let k = vectors.len() - 1;
                vectors[k] = -&vectors[k];
                last = -&last;
            }
        }
        vectors.push(last);
    } else {
        let last = hodge_complement(&vectors)?
            .normalized()
            .ok_or(Error::RankDeficient { rank, required: n - 1 })?;
        vectors.push(last);
    }

    Ok(GeneralizedFrame {
        dim: n,
        vectors,
        chi: vec![0.0; n - 1],
        omega_chi: vec![0.0; n - 1],
        rank,
    })
}

/// Flips frame axes that reversed direction relative to the previous sample.
pub fn align_frame_signs(frames: &mut [GeneralizedFrame]) {
    for k in 1..frames.len() {
        let (head, tail) = frames.split_at_mut(k);
        let prev = &head[k - 1];
        let cur = &mut tail[0];
        for (p, c) in prev.vectors.iter().zip(cur.vectors.iter_mut()) {
            if p.dim() == c.dim() && dot(p, c).unwrap_or(0.0) < 0.0 {
                *c = -&*c;
            }
        }
    }
}

/// Generalized curvatures and frequencies along a sign-aligned frame path.
///
/// `omega_chi[i] = f_i' . f_{i+1}` with `f_i'` from a central difference and
/// `chi[i] = omega_chi[i] / s_dot`. Indices at or beyond `rank - 1` are
/// flat directions and are reported as zero. Entry `j` of the output
/// belongs to sample `j + 1`.
pub fn generalized_invariants(
    frames: &[GeneralizedFrame],
    s_dot: &[f64],
    dt: f64,
) -> Result<Vec<ChiSample>> {
    if frames.len() < 3 {
        return Err(Error::TooFewSamples {
            got: frames.len(),
            need: 3,
        });
    }
    if s_dot.len() != frames.len() {
        return Err(Error::DimensionMismatch {
            left: frames.len(),
            right: s_dot.len(),
        });
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    let n = frames[0].dim;
    if let Some(f) = frames.iter().find(|f| f.dim != n) {
        return Err(Error::DimensionMismatch { left: n, right: f.dim });
    }
    for (k, pair) in frames.windows(2).enumerate() {
        for (i, (a, b)) in pair[0].vectors.iter().zip(&pair[1].vectors).enumerate() {
            if dot(a, b)? < 0.0 {
                return Err(Error::SignFlip { vector: i + 1, sample: k });
            }
        }
    }

    let mut out = Vec::with_capacity(frames.len() - 2);
    for k in 1..frames.len() - 1 {
        let flat_from = frames[k].rank.saturating_sub(1);
        let mut omega_chi = vec![0.0; n - 1];
        let mut chi = vec![0.0; n - 1];
        for i in 0..flat_from.min(n - 1) {
            let diff = &frames[k + 1].vectors[i] - &frames[k - 1].vectors[i];
            let w = dot(&diff, &frames[k].vectors[i + 1])? / (2.0 * dt);
            omega_chi[i] = w;
            chi[i] = if s_dot[k] > 0.0 { w / s_dot[k] } else { 0.0 };
        }
        out.push(ChiSample { chi, omega_chi });
    }
    Ok(out)
}
