pub mod logic;
pub mod rule;
pub mod session;
pub mod tactic;
pub mod term;
pub mod unify;
