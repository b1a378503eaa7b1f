pub mod coalg;
pub mod dupont;
pub mod error;
pub mod forms;
pub mod holonomy;
pub mod json;
pub mod linalg;
pub mod lincomb;
pub mod linf;
pub mod perturb;
pub mod rational;
pub mod sign;
pub mod tensor;
