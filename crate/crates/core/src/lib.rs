pub mod fieldtower;
pub mod forms;
pub mod laws;
pub mod polyring;
pub mod splitting;
pub mod text;
