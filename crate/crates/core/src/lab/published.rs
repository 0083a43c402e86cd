//! Measured values reported for the photonic experiment, kept for side-by-side
//! comparison with simulated runs.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PublishedValue {
    pub quantity: &'static str,
    pub value: f64,
    pub sigma: f64,
    pub provenance: &'static str,
}

const fn row(
    quantity: &'static str,
    value: f64,
    sigma: f64,
    provenance: &'static str,
) -> PublishedValue {
    PublishedValue {
        quantity,
        value,
        sigma,
        provenance,
    }
}

/// Single-question probabilities and `W`.
pub const TABLE_I: [PublishedValue; 6] = [
    row("P(+1|Q0)", 0.4600, 0.012, "Table I"),
    row("P(+1|Q1)", 0.4544, 0.012, "Table I"),
    row("P(+1|Q2)", 0.4603, 0.016, "Table I"),
    row("P(+1|Q3)", 0.4610, 0.011, "Table I"),
    row("P(+1|Q4)", 0.4566, 0.010, "Table I"),
    row("W", 2.292, 0.028, "Table I"),
];

/// Edge correlations measured `Qᵢ` first, and `κ`.
pub const TABLE_II_FORWARD: [PublishedValue; 6] = [
    row("<Q0Q1>", -0.712, 0.002, "Table II, column 1"),
    row("<Q1Q2>", -0.706, 0.002, "Table II, column 1"),
    row("<Q2Q3>", -0.704, 0.002, "Table II, column 1"),
    row("<Q3Q4>", -0.708, 0.002, "Table II, column 1"),
    row("<Q4Q0>", -0.706, 0.002, "Table II, column 1"),
    row("kappa", -3.536, 0.005, "Table II, column 1"),
];

/// Edge correlations measured `Qᵢ₊₁` first, and `κ`.
pub const TABLE_II_REVERSE: [PublishedValue; 6] = [
    row("<Q1Q0>", -0.785, 0.003, "Table II, column 2"),
    row("<Q2Q1>", -0.781, 0.003, "Table II, column 2"),
    row("<Q3Q2>", -0.774, 0.003, "Table II, column 2"),
    row("<Q4Q3>", -0.774, 0.003, "Table II, column 2"),
    row("<Q0Q4>", -0.782, 0.003, "Table II, column 2"),
    row("kappa", -3.896, 0.006, "Table II, column 2"),
];

/// Range of interference visibilities achieved across devices.
pub const VISIBILITY_RANGE: (f64, f64) = (0.80, 0.90);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn totals_match_their_rows() {
        let w: f64 = TABLE_I[..5].iter().map(|r| r.value).sum();
        assert!((w - TABLE_I[5].value).abs() < 5e-3);
        for table in [TABLE_II_FORWARD, TABLE_II_REVERSE] {
            let k: f64 = table[..5].iter().map(|r| r.value).sum();
            assert!((k - table[5].value).abs() < 5e-3, "{k}");
        }
    }
}
