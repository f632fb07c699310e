//! Mass-weighted norms of control fields.

use crate::field::{ControlField, GridMeta};

/// `Σ mᵢ |uᵢ|`
pub fn l1(u: &ControlField) -> f64 {
    u.values().iter().zip(u.mass()).map(|(v, m)| m * v.abs()).sum()
}

/// `sqrt(Σ mᵢ uᵢ²)`
pub fn l2(u: &ControlField) -> f64 {
    u.values().iter().zip(u.mass()).map(|(v, m)| m * v * v).sum::<f64>().sqrt()
}

/// Spatial L² norm of every time slice. A field without a space-time layout
/// is treated as a single slice with unit time weight.
pub fn slice_l2_norms(u: &ControlField) -> Vec<f64> {
    match u.meta() {
        GridMeta::SpaceTime(st) => {
            let n = st.space().len();
            let w = st.space().cell_measure();
            u.values()
                .chunks(n)
                .map(|s| (w * s.iter().map(|v| v * v).sum::<f64>()).sqrt())
                .collect()
        }
        _ => vec![l2(u)],
    }
}

/// Time step weight used by [`group_l1_time`].
pub(crate) fn time_weight(u: &ControlField) -> f64 {
    match u.meta() {
        GridMeta::SpaceTime(st) => st.tau(),
        _ => 1.0,
    }
}

/// `Σ_m τ ‖u(t_m)‖_{L²(Ω)}`, the discrete `L¹(I; L²(Ω))` norm.
pub fn group_l1_time(u: &ControlField) -> f64 {
    let tau = time_weight(u);
    slice_l2_norms(u).iter().map(|s| tau * s).sum()
}
