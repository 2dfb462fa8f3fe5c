use std::cmp::Ordering;

use num_complex::Complex64;

use crate::lti::PoleResidueForm;

/// Ranking of poles by the size of their residues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DominanceMetric {
    /// `|φ|`.
    #[default]
    ResidueMagnitude,
    /// `|φ|/|Re λ|`.
    ResidueOverRealPart,
}

impl DominanceMetric {
    pub fn value(&self, pole: Complex64, residue: Complex64) -> f64 {
        match self {
            DominanceMetric::ResidueMagnitude => residue.norm(),
            DominanceMetric::ResidueOverRealPart => residue.norm() / pole.re.abs().max(f64::MIN_POSITIVE),
        }
    }
}

/// Count actually selected when conjugate pairs made the request
/// unattainable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelectionAdjustment {
    pub requested: usize,
    pub selected: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DominantSelection {
    /// Selected poles, most dominant first; within a pair the member with
    /// positive imaginary part comes first.
    pub poles: Vec<Complex64>,
    /// Dominance values of all poles, in ranked order, divided by the
    /// largest.
    pub normalized: Vec<f64>,
    /// Ranked poles matching `normalized`.
    pub ranked_poles: Vec<Complex64>,
    pub adjustment: Option<SelectionAdjustment>,
}

/// Selects the `k` most dominant poles without splitting conjugate pairs.
/// If only one slot is left when the next candidate is a pair, the pair is
/// taken and `k + 1` poles are returned.
pub fn dominant_poles(prf: &PoleResidueForm, k: usize, metric: DominanceMetric) -> DominantSelection {
    // atoms: a real pole or a conjugate pair (upper member first)
    let mut atoms: Vec<(f64, Vec<Complex64>)> = Vec::new();
    let terms = prf.terms();
    let mut i = 0;
    while i < terms.len() {
        let t = terms[i];
        let pair = i + 1 < terms.len() && t.pole.im != 0.0 && terms[i + 1].pole == t.pole.conj();
        if pair {
            let upper = if t.pole.im > 0.0 { t } else { terms[i + 1] };
            let lower = if t.pole.im > 0.0 { terms[i + 1] } else { t };
            let v = metric.value(upper.pole, upper.residue);
            atoms.push((v, vec![upper.pole, lower.pole]));
            i += 2;
        } else {
            atoms.push((metric.value(t.pole, t.residue), vec![t.pole]));
            i += 1;
        }
    }
    atoms.sort_by(|a, b| {
        b.0.total_cmp(&a.0)
            .then(a.1[0].norm().total_cmp(&b.1[0].norm()))
            .then(b.1[0].im.total_cmp(&a.1[0].im))
            .then(Ordering::Equal)
    });
    let top = atoms.first().map(|a| a.0).unwrap_or(0.0);
    let mut normalized = Vec::with_capacity(terms.len());
    let mut ranked_poles = Vec::with_capacity(terms.len());
    for (v, poles) in &atoms {
        for p in poles {
            normalized.push(if top > 0.0 { v / top } else { 0.0 });
            ranked_poles.push(*p);
        }
    }
    let mut poles = Vec::with_capacity(k + 1);
    for (_, members) in &atoms {
        if poles.len() >= k {
            break;
        }
        poles.extend(members.iter().copied());
    }
    let adjustment = (poles.len() != k).then_some(SelectionAdjustment {
        requested: k,
        selected: poles.len(),
    });
    DominantSelection {
        poles,
        normalized,
        ranked_poles,
        adjustment,
    }
}

/// Suggests a count of dominant poles: the position of the largest ratio
/// drop in the normalized sequence (never splitting a pair).
pub fn suggest_dominant_count(normalized: &[f64], ranked_poles: &[Complex64], max: usize) -> usize {
    let mut best = (0usize, 1.0f64);
    for i in 1..normalized.len().min(max + 1) {
        // only cut between atoms
        if ranked_poles[i] == ranked_poles[i - 1].conj() && ranked_poles[i].im != 0.0 {
            continue;
        }
        let ratio = normalized[i] / normalized[i - 1].max(f64::MIN_POSITIVE);
        if ratio < best.1 {
            best = (i, ratio);
        }
    }
    best.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lti::PoleTerm;

    #[test]
    fn magnitude_ranking() {
        let p = PoleResidueForm::new(vec![PoleTerm::real(-1.0, 10.0), PoleTerm::real(-2.0, 1.0)], 0.0).unwrap();
        let sel = dominant_poles(&p, 1, DominanceMetric::ResidueMagnitude);
        assert_eq!(sel.poles, vec![Complex64::new(-1.0, 0.0)]);
        assert_eq!(sel.normalized, vec![1.0, 0.1]);
        assert!(sel.adjustment.is_none());
    }

    #[test]
    fn pairs_are_atomic() {
        let c = Complex64::new;
        let p = PoleResidueForm::new(
            vec![
                PoleTerm::new(c(-1.0, 1.0), c(3.0, -1.0)),
                PoleTerm::new(c(-1.0, -1.0), c(3.0, 1.0)),
                PoleTerm::real(-5.0, 1.0),
            ],
            0.0,
        )
        .unwrap();
        let sel = dominant_poles(&p, 1, DominanceMetric::ResidueMagnitude);
        assert_eq!(sel.poles, vec![c(-1.0, 1.0), c(-1.0, -1.0)]);
        assert_eq!(
            sel.adjustment,
            Some(SelectionAdjustment {
                requested: 1,
                selected: 2
            })
        );
    }

    #[test]
    fn ties_prefer_smaller_pole() {
        let p = PoleResidueForm::new(vec![PoleTerm::real(-3.0, 1.0), PoleTerm::real(-2.0, 1.0)], 0.0).unwrap();
        let sel = dominant_poles(&p, 1, DominanceMetric::ResidueMagnitude);
        assert_eq!(sel.poles, vec![Complex64::new(-2.0, 0.0)]);
    }

    #[test]
    fn alternate_metric() {
        let p = PoleResidueForm::new(vec![PoleTerm::real(-10.0, 2.0), PoleTerm::real(-0.1, 1.0)], 0.0).unwrap();
        let sel = dominant_poles(&p, 1, DominanceMetric::ResidueOverRealPart);
        assert_eq!(sel.poles, vec![Complex64::new(-0.1, 0.0)]);
    }

    #[test]
    fn suggestion_finds_gap() {
        let normalized = [1.0, 1.0, 0.03, 0.03, 0.02];
        let c = Complex64::new;
        let poles = [c(-1.0, 1.0), c(-1.0, -1.0), c(-2.0, 1.0), c(-2.0, -1.0), c(-3.0, 0.0)];
        assert_eq!(suggest_dominant_count(&normalized, &poles, 4), 2);
    }
}
