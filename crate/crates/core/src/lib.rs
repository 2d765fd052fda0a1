//! Relative orders on finitely presented groups, computed on finite Cayley balls.

pub mod affine;
pub mod ball;
pub mod catalog;
pub mod certify;
pub mod dynamics;
pub mod orders;
pub mod presentation;
pub mod realization;
pub mod rewriting;
pub mod word;

pub use presentation::{parse_presentation, parse_word, GroupPresentation, ParseError};
pub use rewriting::{parse_rules, ConfluenceReport, ReductionOrder, RewriteError, RewritingSystem, Rule};
pub use word::{Alphabet, Letter, Word};
