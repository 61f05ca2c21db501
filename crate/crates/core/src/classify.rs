//! Rule cascade deciding which kind of multiple testing applies and whether
//! alpha needs adjusting.

use serde::{Deserialize, Serialize};

use crate::model::TestingMode;

/// Answers to the classification questions. All fields are required.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassificationInput {
    /// Is the claim warranted by a specific p value and alpha level?
    pub statistical_claim: bool,
    /// Is the claim about a joint hypothesis rather than each test's own hypothesis?
    pub joint_inference: bool,
    /// Must every constituent be significant for the joint claim?
    pub all_constituents_required: bool,
    pub exchangeable: bool,
    pub family_theoretically_relevant: bool,
}

impl ClassificationInput {
    /// Every combination of the five answers, in binary counting order.
    pub fn all_combinations() -> impl Iterator<Item = ClassificationInput> {
        (0u8..32).map(|bits| ClassificationInput {
            statistical_claim: bits & 1 != 0,
            joint_inference: bits & 2 != 0,
            all_constituents_required: bits & 4 != 0,
            exchangeable: bits & 8 != 0,
            family_theoretically_relevant: bits & 16 != 0,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RuleCode {
    NoStatisticalClaim,
    IndividualHypotheses,
    SelectiveReportingIndividual,
    HeapOfHypotheses,
    AllConstituentsRequired,
    AnyConstituentSuffices,
    NotExchangeable,
    SelectiveReportingJoint,
}

impl RuleCode {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleCode::NoStatisticalClaim => "NO_STATISTICAL_CLAIM",
            RuleCode::IndividualHypotheses => "INDIVIDUAL_HYPOTHESES",
            RuleCode::SelectiveReportingIndividual => "SELECTIVE_REPORTING_INDIVIDUAL",
            RuleCode::HeapOfHypotheses => "HEAP_OF_HYPOTHESES",
            RuleCode::AllConstituentsRequired => "ALL_CONSTITUENTS_REQUIRED",
            RuleCode::AnyConstituentSuffices => "ANY_CONSTITUENT_SUFFICES",
            RuleCode::NotExchangeable => "NOT_EXCHANGEABLE",
            RuleCode::SelectiveReportingJoint => "SELECTIVE_REPORTING_JOINT",
        }
    }

    pub fn is_warning(self) -> bool {
        matches!(self, RuleCode::HeapOfHypotheses | RuleCode::NotExchangeable)
    }

    pub fn text(self) -> &'static str {
        match self {
            RuleCode::NoStatisticalClaim => {
                "the claim is not tied to a specific p value and alpha level, \
                 so the question of alpha adjustment does not arise"
            }
            RuleCode::IndividualHypotheses => {
                "each test decides its own hypothesis; test each at the unadjusted alpha, \
                 whose per-test Type I error rate does not grow with the number of tests"
            }
            RuleCode::SelectiveReportingIndividual => {
                "unreported tests do not inflate an individual test's alpha, but they should \
                 still be reported so that no joint claim is implied"
            }
            RuleCode::HeapOfHypotheses => {
                "warning: the declared family has no theoretically relevant joint hypothesis; \
                 treating the tests as individual tests (override deliberately if intended)"
            }
            RuleCode::AllConstituentsRequired => {
                "the joint claim needs every constituent to be significant; use conjunction \
                 testing with each constituent at the joint alpha (expect lower joint power)"
            }
            RuleCode::AnyConstituentSuffices => {
                "any significant constituent rejects the joint null; use disjunction testing \
                 and lower each constituent's alpha to hold the joint alpha"
            }
            RuleCode::NotExchangeable => {
                "warning: disjunction testing assumes the constituents are theoretically \
                 exchangeable with regards to inferences about the joint hypothesis"
            }
            RuleCode::SelectiveReportingJoint => {
                "report every constituent test; hiding nonsignificant constituents misstates \
                 the joint Type I error rate"
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Recommendation {
    /// `None` when no statistical claim is being made.
    pub mode: Option<TestingMode>,
    pub adjust_alpha: bool,
    pub rationale: Vec<RuleCode>,
}

impl Recommendation {
    pub fn mode_label(&self) -> &'static str {
        self.mode.map_or("not_applicable", TestingMode::as_str)
    }

    fn new(mode: Option<TestingMode>, rationale: Vec<RuleCode>) -> Self {
        Recommendation {
            mode,
            adjust_alpha: mode == Some(TestingMode::Disjunction),
            rationale,
        }
    }
}

pub fn classify_testing_mode(input: &ClassificationInput) -> Recommendation {
    use RuleCode::*;

    if !input.statistical_claim {
        return Recommendation::new(None, vec![NoStatisticalClaim]);
    }
    if !input.joint_inference {
        return Recommendation::new(
            Some(TestingMode::Individual),
            vec![IndividualHypotheses, SelectiveReportingIndividual],
        );
    }
    if !input.family_theoretically_relevant {
        return Recommendation::new(
            Some(TestingMode::Individual),
            vec![HeapOfHypotheses, IndividualHypotheses],
        );
    }
    if input.all_constituents_required {
        return Recommendation::new(
            Some(TestingMode::Conjunction),
            vec![AllConstituentsRequired],
        );
    }

    let mut rationale = vec![AnyConstituentSuffices];
    if !input.exchangeable {
        rationale.push(NotExchangeable);
    }
    rationale.push(SelectiveReportingJoint);
    Recommendation::new(Some(TestingMode::Disjunction), rationale)
}
