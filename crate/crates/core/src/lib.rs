//! Approval-based budget division: rules, fairness audits and consistency checks.

pub mod classic;
pub mod consistency;
pub mod corpus;
pub mod error;
pub mod fairness;
pub mod model;
pub mod oracle;
pub mod rule;
pub mod seqpay;

pub use error::{Error, Result};
pub use rule::{Rule, RuleOutput};
