pub mod exec;
pub mod scalar;
pub mod simplex_grid;
pub mod labeling;
pub mod sperner_search;
pub mod economy;
pub mod solver;
pub mod equivalence;
pub mod json_numbers;
