pub mod error;
pub mod graph;
pub mod maxflow;
pub mod metrics;
pub mod ratio;
pub mod hitmiss;
pub mod params;
pub mod isolating;
pub mod expander;
pub mod tree;
pub mod oracles;
pub mod steps;
pub mod gen;
pub mod ghtree;
pub mod approx;
pub mod io;
