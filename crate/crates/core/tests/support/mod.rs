#![allow(dead_code)]

pub mod holder_oracle;
pub mod trig;
