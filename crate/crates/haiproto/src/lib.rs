//! Typed notation, checker, catalog and simulator for human-AI interaction
//! protocols.
//!
//! Interactions are written as actions (`provide`/`request` primitives with
//! typed arguments and contextualizing operations), messages (an action sent
//! between two roles) and patterns (ordered message sequences).
//!
//! ```
//! let file = haiproto::dsl::parse(
//!     "action select-class(Y, L) := provide(Y: output.label, L: [output.label]) <- select(Y, L);",
//! ).unwrap();
//! print!("{}", haiproto::dsl::print(&file));
//! ```

pub mod catalog;
pub mod check;
pub mod diag;
pub mod diagram;
pub mod dsl;
pub mod model;
pub mod runtime;
