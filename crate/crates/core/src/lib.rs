pub mod category;
pub mod examples;
pub mod morphism;
pub mod ominimal;
pub mod parser;
pub mod random;
pub mod semantics;
pub mod syntax;
