pub mod baseline;
pub mod brute_force;
pub mod eval;
pub mod gen_data;
pub mod search;
pub mod train;
pub mod validate;
