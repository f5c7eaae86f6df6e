pub mod sat;
pub mod forl;
pub mod relational;
pub mod grounder;
pub mod analyses;
pub mod dl;
pub mod nl;
pub mod model;
