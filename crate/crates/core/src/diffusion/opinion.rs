use crate::{Error, Result};

/// One activator's signed input to a newly activated node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Contribution {
    /// Final opinion `o'_u` of the activator.
    pub opinion: f64,
    /// `true` when the interaction coin kept the orientation (α = 0).
    pub agrees: bool,
}

impl Contribution {
    #[inline]
    pub fn signed(self) -> f64 {
        if self.agrees {
            self.opinion
        } else {
            -self.opinion
        }
    }
}

/// Final opinion of a node activated by every member of `activators` at once:
/// `o'_v = (o_v + mean_u (-1)^α_u o'_u) / 2`.
///
/// With a single activator this is the OI-IC update; with the frozen set of
/// active in-neighbours it is the OI-LT update.
pub fn simultaneous_activation_policy(
    own_opinion: f64,
    activators: &[Contribution],
) -> Result<f64> {
    if activators.is_empty() {
        return Err(Error::EmptyActivatorSet);
    }
    Ok(combine(own_opinion, activators.iter().map(|c| c.signed())))
}

#[inline]
pub(crate) fn combine(own_opinion: f64, signed: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut count) = (0.0, 0usize);
    for s in signed {
        sum += s;
        count += 1;
    }
    debug_assert!(count > 0);
    (own_opinion + sum / count as f64) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(opinion: f64, agrees: bool) -> Contribution {
        Contribution { opinion, agrees }
    }

    #[test]
    fn single_activator_is_plain_update() {
        let o = simultaneous_activation_policy(-0.3, &[c(0.8, true)]).unwrap();
        assert_eq!(o, (-0.3 + 0.8) / 2.0);
        let o = simultaneous_activation_policy(-0.3, &[c(0.8, false)]).unwrap();
        assert_eq!(o, (-0.3 - 0.8) / 2.0);
    }

    #[test]
    fn opposite_activators_cancel() {
        let o = simultaneous_activation_policy(0.0, &[c(1.0, true), c(-1.0, true)]).unwrap();
        assert_eq!(o, 0.0);
    }

    #[test]
    fn mixed_agreement() {
        // (0.2 + (0.8 - 0.6) / 2) / 2
        let o = simultaneous_activation_policy(0.2, &[c(0.8, true), c(0.6, false)]).unwrap();
        assert!((o - 0.15).abs() < 1e-15);
    }

    #[test]
    fn empty_is_contract_violation() {
        assert!(matches!(
            simultaneous_activation_policy(0.1, &[]),
            Err(Error::EmptyActivatorSet)
        ));
    }
}
