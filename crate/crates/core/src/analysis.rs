//! Series-level pipelines: Park and Frenet components per sample, Park versus
//! Frenet comparison, and generalized n-phase invariants.

use std::io::Write;

use crate::error::{Error, Result};
use crate::frenet::{frenet3, frenet_apply, psi_frame, psi_rotation, DerivativeBundle, FrenetState, FrenetTolerances};
use crate::frenet_nd::{align_frame_signs, generalized_invariants, gram_schmidt_frame, GeneralizedFrame, DEFAULT_RANK_TOL};
use crate::geometry::PhaseVector;
use crate::park::{park_angle, park_apply, park_matrix};
use crate::signal::{derivative_stacks, fmt_num, write_table, DerivativeSource, SampledSeries, OMEGA_O};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    /// Park frame speed (rad/s).
    pub park_omega: f64,
    /// Park angle at the first sample (rad).
    pub theta_p0: f64,
    /// Absolute magnitude threshold; `None` scales it to the series peak.
    pub eps_v: Option<f64>,
    pub eps_kappa: f64,
    pub rank_tol: f64,
    pub source: DerivativeSource,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            park_omega: OMEGA_O,
            theta_p0: 0.0,
            eps_v: None,
            eps_kappa: crate::frenet::EPS_KAPPA,
            rank_tol: DEFAULT_RANK_TOL,
            source: DerivativeSource::FiniteDifference {
                allow_high_order: false,
            },
        }
    }
}

impl AnalysisOptions {
    fn tolerances(&self, series: &SampledSeries) -> FrenetTolerances {
        let mut tol = FrenetTolerances::for_nominal(series.max_magnitude());
        if let Some(eps) = self.eps_v {
            tol.eps_v = eps;
        }
        tol.eps_kappa = self.eps_kappa;
        tol
    }

    fn park_angles(&self, series: &SampledSeries) -> Result<Vec<f64>> {
        park_angle(&vec![self.park_omega; series.len()], series.dt, self.theta_p0)
    }
}

/// Output scaling: SI, or per unit of a voltage base and a frequency base.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Units {
    pub v_base: f64,
    pub omega_base: f64,
}

impl Units {
    pub const SI: Units = Units {
        v_base: 1.0,
        omega_base: 1.0,
    };

    pub fn per_unit(v_base: f64) -> Self {
        Self {
            v_base,
            omega_base: OMEGA_O,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisRow {
    pub t: f64,
    pub theta_p: f64,
    pub state: FrenetState,
    /// `(v_T, v_N, v_B)`, present when the frame is defined.
    pub v_tnb: Option<PhaseVector>,
    pub v_dqo: PhaseVector,
}

fn require_three_phase(series: &SampledSeries) -> Result<()> {
    if series.dim() != 3 {
        return Err(Error::InvalidParameter(format!(
            "the dqo/TNB pipeline needs 3 phases, input has {}; use nd-analyze",
            series.dim()
        )));
    }
    Ok(())
}

/// Park components and Frenet invariants at every sample that has
/// derivative estimates (all of them for closed-form channels, all but two
/// at each end for finite differences).
pub fn analyze_three_phase(series: &SampledSeries, opts: &AnalysisOptions) -> Result<Vec<AnalysisRow>> {
    require_three_phase(series)?;
    let tol = opts.tolerances(series);
    let thetas = opts.park_angles(series)?;
    let stacks = derivative_stacks(series, 2, opts.source)?;
    let mut rows = Vec::with_capacity(series.len());
    for (k, stack) in stacks.into_iter().enumerate() {
        let Some(mut stack) = stack else { continue };
        let v2 = stack.pop().expect("stack of 3");
        let v1 = stack.pop().expect("stack of 3");
        let v = stack.pop().expect("stack of 3");
        let bundle = DerivativeBundle::new(v, v1, v2, None)?;
        let state = frenet3(&bundle, &tol)?;
        let v_tnb = if state.defined {
            Some(frenet_apply(&state, &bundle.v)?)
        } else {
            None
        };
        let v_dqo = park_apply(thetas[k], &bundle.v)?;
        rows.push(AnalysisRow {
            t: series.time(k),
            theta_p: thetas[k],
            state,
            v_tnb,
            v_dqo,
        });
    }
    Ok(rows)
}

pub const ANALYSIS_HEADER: [&str; 11] = [
    "t", "defined", "vmag", "w_kappa", "w_tau", "vT", "vN", "vB", "vd", "vq", "vo",
];

pub fn write_analysis_csv<W: Write>(rows: &[AnalysisRow], units: Units, writer: W) -> Result<()> {
    let header: Vec<String> = ANALYSIS_HEADER.iter().map(|s| s.to_string()).collect();
    let v = |x: f64| fmt_num(x / units.v_base);
    let w = |x: f64| fmt_num(x / units.omega_base);
    let out = rows.iter().map(|r| {
        let s = &r.state;
        let mut row = vec![fmt_num(r.t)];
        if let Some(tnb) = &r.v_tnb {
            row.push("1".into());
            row.push(v(s.s_dot));
            row.push(w(s.omega_kappa));
            row.push(w(s.omega_tau));
            row.extend(tnb.iter().map(|x| v(*x)));
        } else {
            row.push("0".into());
            row.push(v(s.s_dot));
            row.extend(std::iter::repeat_n(String::new(), 5));
        }
        row.extend(r.v_dqo.iter().map(|x| v(*x)));
        row
    });
    write_table(writer, &header, out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub t: f64,
    /// Largest Euclidean distance between matching rows of `P` and `F`.
    pub deviation: f64,
    /// Largest entry of `|Ω_Ψ|`.
    pub psi_rotation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub undefined: usize,
    pub max_deviation: f64,
    pub mean_deviation: f64,
    pub max_psi_rotation: f64,
}

impl ComparisonReport {
    pub fn render<W: Write>(&self, units: Units, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{:>24} {:>22} {:>22}", "t", "max_row_deviation", "max_abs_omega_psi")?;
        for r in &self.rows {
            writeln!(
                w,
                "{:>24} {:>22} {:>22}",
                fmt_num(r.t),
                fmt_num(r.deviation),
                fmt_num(r.psi_rotation / units.omega_base)
            )?;
        }
        writeln!(w, "# samples compared: {}", self.rows.len())?;
        writeln!(w, "# undefined samples: {}", self.undefined)?;
        writeln!(w, "# max deviation: {}", fmt_num(self.max_deviation))?;
        writeln!(w, "# mean deviation: {}", fmt_num(self.mean_deviation))?;
        writeln!(
            w,
            "# max |Omega_Psi|: {}",
            fmt_num(self.max_psi_rotation / units.omega_base)
        )?;
        Ok(())
    }
}

/// Per-sample distance between the Park matrix at the configured speed and
/// the Frenet frame, plus the rotation of the coupling frame Ψ = P F^T.
pub fn compare_frames(series: &SampledSeries, opts: &AnalysisOptions) -> Result<ComparisonReport> {
    let rows = analyze_three_phase(series, opts)?;
    let mut out = Vec::with_capacity(rows.len());
    let mut undefined = 0;
    for r in &rows {
        let Some(f) = r.state.frame_matrix() else {
            undefined += 1;
            continue;
        };
        let p = park_matrix(r.theta_p);
        let deviation = (0..3)
            .map(|i| (&p.row(i) - &f.row(i)).norm())
            .fold(0.0, f64::max);
        let psi = psi_frame(r.theta_p, &f)?;
        let omega_psi = psi_rotation(opts.park_omega, &psi, &r.state.omega_matrix())?;
        out.push(ComparisonRow {
            t: r.t,
            deviation,
            psi_rotation: omega_psi.max_abs(),
        });
    }
    let max_deviation = out.iter().map(|r| r.deviation).fold(0.0, f64::max);
    let mean_deviation = if out.is_empty() {
        0.0
    } else {
        out.iter().map(|r| r.deviation).sum::<f64>() / out.len() as f64
    };
    let max_psi_rotation = out.iter().map(|r| r.psi_rotation).fold(0.0, f64::max);
    Ok(ComparisonReport {
        rows: out,
        undefined,
        max_deviation,
        mean_deviation,
        max_psi_rotation,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NdRow {
    pub t: f64,
    pub vmag: f64,
    /// Generalized frequencies; `None` when the frame or its neighbours are undefined.
    pub omega_chi: Option<Vec<f64>>,
    pub chi: Option<Vec<f64>>,
    /// 0 for undefined samples.
    pub rank: usize,
    pub frame: Option<GeneralizedFrame>,
}

/// Generalized invariants of an n-phase series (n >= 3).
///
/// Derivatives up to order `min(n - 1, 3)` feed the Gram-Schmidt step; with
/// finite differences and `allow_high_order` set, up to order `n - 1`.
/// Samples whose magnitude is at or below the threshold, or whose frame
/// cannot be built, are reported with rank 0. Frequencies need defined
/// neighbours on both sides.
pub fn analyze_nd(series: &SampledSeries, opts: &AnalysisOptions) -> Result<Vec<NdRow>> {
    let n = series.dim();
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "nd-analyze needs at least 3 phases, input has {n}"
        )));
    }
    let max_order = match opts.source {
        DerivativeSource::FiniteDifference { allow_high_order: true } => n - 1,
        _ => (n - 1).min(3),
    };
    let tol = opts.tolerances(series);
    let stacks = derivative_stacks(series, max_order, opts.source)?;

    let mut rows: Vec<NdRow> = Vec::with_capacity(series.len());
    for (k, stack) in stacks.into_iter().enumerate() {
        let Some(stack) = stack else { continue };
        let vmag = stack[0].norm();
        let frame = if vmag == 0.0 || vmag <= tol.eps_v {
            None
        } else {
            gram_schmidt_frame(&stack, opts.rank_tol).ok()
        };
        rows.push(NdRow {
            t: series.time(k),
            vmag,
            omega_chi: None,
            chi: None,
            rank: frame.as_ref().map_or(0, |f| f.rank),
            frame,
        });
    }

    // invariants over each run of consecutive defined frames
    let mut start = 0;
    while start < rows.len() {
        if rows[start].frame.is_none() {
            start += 1;
            continue;
        }
        let mut end = start;
        while end < rows.len() && rows[end].frame.is_some() {
            end += 1;
        }
        if end - start >= 3 {
            let mut frames: Vec<GeneralizedFrame> =
                rows[start..end].iter().map(|r| r.frame.clone().expect("defined")).collect();
            align_frame_signs(&mut frames);
            let s_dot: Vec<f64> = rows[start..end].iter().map(|r| r.vmag).collect();
            let inv = generalized_invariants(&frames, &s_dot, series.dt)?;
            for (j, sample) in inv.into_iter().enumerate() {
                let row = &mut rows[start + 1 + j];
                row.omega_chi = Some(sample.omega_chi);
                row.chi = Some(sample.chi);
            }
            for (row, f) in rows[start..end].iter_mut().zip(frames) {
                row.frame = Some(f);
            }
        }
        start = end;
    }
    Ok(rows)
}

pub fn write_nd_csv<W: Write>(rows: &[NdRow], dim: usize, units: Units, writer: W) -> Result<()> {
    let mut header = vec!["t".to_string(), "vmag".to_string()];
    header.extend((1..dim).map(|i| format!("w_chi_{i}")));
    header.push("rank".into());
    let out = rows.iter().map(|r| {
        let mut row = vec![fmt_num(r.t), fmt_num(r.vmag / units.v_base)];
        match &r.omega_chi {
            Some(w) => row.extend(w.iter().map(|x| fmt_num(x / units.omega_base))),
            None => row.extend(std::iter::repeat_n(String::new(), dim - 1)),
        }
        row.push(r.rank.to_string());
        row
    });
    write_table(writer, &header, out)
}
