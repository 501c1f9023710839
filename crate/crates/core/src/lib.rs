pub mod exact;
pub mod poly;
pub mod dga;
pub mod bar;
pub mod trace;
pub mod segal;
