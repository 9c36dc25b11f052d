#![allow(dead_code)]
pub mod feature_oracle;
pub mod fixtures;
