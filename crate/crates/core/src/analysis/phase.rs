use crate::field::SpinorField;
use crate::maps::PhaseMap;

/// Amplitudes below this carry no usable phase.
pub const AMPLITUDE_FLOOR: f64 = 1e-6;

/// `arg <down|psi> - arg <up|psi>` on the principal branch `(-pi, pi]`,
/// masked where either amplitude is below [`AMPLITUDE_FLOOR`].
pub fn phase_difference_map(field: &SpinorField) -> PhaseMap {
    let grid = *field.grid();
    let (values, valid): (Vec<f64>, Vec<bool>) = field
        .cells()
        .iter()
        .map(|s| {
            if s.up.norm().min(s.down.norm()) < AMPLITUDE_FLOOR {
                return (0.0, false);
            }
            let d = (s.down * s.up.conj()).arg();
            (if d <= -std::f64::consts::PI { std::f64::consts::PI } else { d }, true)
        })
        .unzip();
    PhaseMap::new(grid, values, valid).expect("sizes follow the field")
}
