pub mod corpus;
pub mod fsio;
pub mod judge;
pub mod language;
pub mod metrics;
pub mod pipeline;
pub mod rng;
pub mod syntax;
pub mod transforms;
pub mod validation;
