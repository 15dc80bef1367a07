pub mod error;
pub mod kernel;
pub mod rule;
pub mod session;
pub mod syntax;
pub mod tactic;
pub mod term;
pub mod theory;
pub mod unify;

pub use error::{Error, Result};
pub use kernel::Theorem;
pub use term::{Name, Subst, Term, Type, Var};
pub use theory::{Fixity, Theory};
pub use unify::{DisagreementPair, Env, UnifyResult};
pub use syntax::{parse_prop, parse_term, parse_theory, print_term, print_thm, ParseCtx};
pub use session::{Session, TacticSpec};
pub use tactic::{ProofState, Tactic};
