//! Modal queries over Kripke models with individual concepts, compiled to
//! relational algebra over a fixed four-relation encoding of the model, plus
//! a differential harness checking the compiled query against the truth
//! definition.

pub mod harness;
pub mod kripke;
pub mod par;
pub mod relalg;
pub mod schema;
pub mod syntax;
pub mod translate;
