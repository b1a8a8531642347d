pub mod backwards;
pub mod builders;
pub mod expr;
pub mod graph;
pub mod io;
pub mod logic;
pub mod lower_bounds;
pub mod synthesis;
pub mod tree_decomp;
