//! Competitors glued near the boundary of a dyadic domain: slice selection,
//! the gluing pipeline with its measure ledger, the homology certificate for
//! the glued sets, the direct competitor checker and the weld-size probe.

mod cells;
mod certificate;
mod glue;
mod params;
mod probe;
pub mod scenario;
mod slice;
mod verify;

use std::collections::BTreeSet;

pub use cells::{
    augmentation, box_complex, cell_complement, cells_by_domain, chain_axpy, chain_boundary, chain_distance,
    chain_misses, default_margin, domain_complex, from_cube_chain, to_cube_chain, CubeChain,
};
pub use certificate::{
    chain_text, competitor_certificate, CertOptions, Certificate, KCertificate, KernelWitness, StepVerdict, TestCycleWitness,
};
pub use glue::{glue_competitor, measure_audit, AuditReport, AuditRow, GlueLedger, GlueOutput, KEntry, KTerms, WeldCheck};
pub use params::GlueParams;
pub use probe::{annulus_probe, grid_vanishing_probe, AnnulusProbe, ProbeTable};
pub use slice::{boundary_trace, select_slice, SliceChoice, SliceTrace};
pub use verify::{verify_topological_competitor, CompetitorVerdict, GeneratorVerdict, VerifyOptions};

use crate::error::Result;
use crate::geom::MAX_DIM;
use crate::geomset::{PolySet, Region};
use crate::scalar::{lit, to_f64, Scalar};

/// Comparison of two sets inside a window.
#[derive(Clone, Debug)]
pub struct WindowComparison {
    /// Both restrictions consist of the same simplices after canonicalization.
    pub exact: bool,
    /// Largest distance from a point of either set to the other one.
    pub excess: f64,
    /// Difference of the two measures.
    pub measure_gap: f64,
    pub equal: bool,
}

fn canonical<T: Scalar>(set: &PolySet<T>, window: &Region<T>) -> Result<BTreeSet<Vec<[u64; MAX_DIM]>>> {
    let r = set.restrict(window)?.reduce();
    Ok(r.simplices
        .iter()
        .map(|s| {
            let mut k: Vec<[u64; MAX_DIM]> = s.iter().map(|p| p.bit_key()).collect();
            k.sort_unstable();
            k
        })
        .collect())
}

/// Decides whether `a` and `b` agree inside `window`: exactly when the
/// canonical pieces coincide, otherwise up to `tol` in excess and measure.
pub fn compare_in_window<T: Scalar>(a: &PolySet<T>, b: &PolySet<T>, window: &Region<T>, tol: f64) -> Result<WindowComparison> {
    let exact = canonical(a, window)? == canonical(b, window)?;
    if exact {
        return Ok(WindowComparison { exact, excess: 0.0, measure_gap: 0.0, equal: true });
    }
    let t: T = lit(tol * 0.5);
    let excess = to_f64(a.excess(b, window, t)?).max(to_f64(b.excess(a, window, t)?));
    let measure_gap = (to_f64(a.measure(window)?) - to_f64(b.measure(window)?)).abs();
    Ok(WindowComparison { exact, excess, measure_gap, equal: excess <= tol && measure_gap <= tol })
}
