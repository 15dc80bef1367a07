use thiserror::Error;

/// Every failure the prover can report. Failures are values; nothing here aborts.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ill-typed term: {0}")]
    IllTyped(String),
    #[error("dangling bound variable {0}")]
    DanglingBound(u32),

    #[error("hypotheses may not contain schematic variables")]
    SchematicInHyp,
    #[error("not an implication")]
    NotImplication,
    #[error("premise does not match the major premise's antecedent")]
    PremiseMismatch,
    #[error("eigenvariable condition violated: {0} is free in the hypotheses")]
    EigenvariableViolation(String),
    #[error("not a meta-quantification")]
    NotQuantified,
    #[error("not a meta-equality")]
    NotEquality,
    #[error("middle terms of transitivity do not agree")]
    MiddleMismatch,
    #[error("mismatch: {0}")]
    Mismatch(String),
    #[error("unknown axiom {0}")]
    UnknownAxiom(String),
    #[error("theorem has hypotheses")]
    HasHypotheses,
    #[error("theorems come from unrelated theories {0} and {1}")]
    TheoryMismatch(String, String),
    #[error("expected a free variable")]
    NotAFree,

    #[error("no subgoal {0}")]
    NoSubgoal(usize),

    #[error("duplicate name {0}")]
    DuplicateName(String),
    #[error("ill-typed axiom {0}: {1}")]
    IllTypedAxiom(String, String),
    #[error("bad definition {0}: {1}")]
    BadDefinition(String, String),
    #[error("no definition for {0}")]
    NoSuchDef(String),
    #[error("unknown theory {0}")]
    UnknownTheory(String),

    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("{0} subgoal(s) remain")]
    SubgoalsRemain(usize),
    #[error("unresolved flex-flex constraints")]
    UnresolvedFlexFlex,
    #[error("repeat exceeded {0} iterations")]
    RepeatLimit(usize),

    #[error("unknown id {0}")]
    UnknownId(String),
    #[error("tactic failed: {0}")]
    TacticFailed(String),
    #[error("no more alternatives")]
    NoMoreAlternatives,
    #[error("nothing to undo")]
    NothingToUndo,
    #[error("io: {0}")]
    Io(String),
    #[error("bad request: {0}")]
    BadRequest(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse { pos, msg: msg.into() }
    }
}
