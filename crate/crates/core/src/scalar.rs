//! Real scalar bound shared by the generic geometry and barrier code.

use num_traits::{Float, FloatConst};
use std::fmt::{Debug, Display};

pub trait Real: Float + FloatConst + Debug + Display + Default + Send + Sync + 'static {
    fn lit(x: f64) -> Self {
        Self::from(x).expect("literal representable")
    }

    fn int(n: i64) -> Self {
        Self::from(n).expect("integer representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl<T> Real for T where T: Float + FloatConst + Debug + Display + Default + Send + Sync + 'static {}
