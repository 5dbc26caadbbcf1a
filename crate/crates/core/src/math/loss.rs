use serde::{Deserialize, Serialize};

/// Class code used inside margin losses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassCode {
    Positive,
    Negative,
}

impl ClassCode {
    pub fn sign(self) -> f64 {
        match self {
            ClassCode::Positive => 1.0,
            ClassCode::Negative => -1.0,
        }
    }

    /// Maps a binary label (1 = positive, 0 = negative) to a class code.
    pub fn from_label(label: u8) -> Self {
        if label == 1 {
            ClassCode::Positive
        } else {
            ClassCode::Negative
        }
    }
}

/// Margin losses `l(y, t)`; `t` is the real-valued score of a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// `max(0, 1 - y t)`
    Hinge,
    /// `max(-2 y t, max(0, 1 - y t))`
    DoubleHinge,
    /// `1 / (1 + exp(y t))`
    Sigmoid,
    /// `ln(1 + exp(-y t))`
    Logistic,
}

impl LossKind {
    pub const ALL: [LossKind; 4] = [
        LossKind::Hinge,
        LossKind::DoubleHinge,
        LossKind::Sigmoid,
        LossKind::Logistic,
    ];
}

/// Evaluates `l(y, t)`.
pub fn loss_eval(kind: LossKind, y: ClassCode, t: f64) -> f64 {
    let m = y.sign() * t;
    match kind {
        LossKind::Hinge => (1.0 - m).max(0.0),
        LossKind::DoubleHinge => (-2.0 * m).max((1.0 - m).max(0.0)),
        LossKind::Sigmoid => sigmoid(-m),
        LossKind::Logistic => softplus(-m),
    }
}

/// Derivative of `l(y, t)` with respect to `t`.
///
/// Hinge and double hinge are piecewise linear; at a kink the right-hand
/// derivative is returned.
pub fn loss_grad(kind: LossKind, y: ClassCode, t: f64) -> f64 {
    let s = y.sign();
    let m = s * t;
    match kind {
        LossKind::Hinge => {
            // d/dt max(0, 1 - s t): right derivative at t = 1/s.
            let right = if s > 0.0 { m >= 1.0 } else { m > 1.0 };
            if right {
                0.0
            } else {
                -s
            }
        }
        LossKind::DoubleHinge => {
            // Pieces in t: -2 s t (m <= -1), 1 - s t (-1 <= m <= 1), 0 (m >= 1).
            // Moving right in t moves m by sign s.
            if s > 0.0 {
                if m < -1.0 {
                    -2.0 * s
                } else if m < 1.0 {
                    -s
                } else {
                    0.0
                }
            } else if m <= -1.0 {
                -2.0 * s
            } else if m <= 1.0 {
                -s
            } else {
                0.0
            }
        }
        LossKind::Sigmoid => {
            // d/dm sigmoid(-m) = -sigmoid(m) sigmoid(-m)
            -s * sigmoid(m) * sigmoid(-m)
        }
        LossKind::Logistic => -s * sigmoid(-m),
    }
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x + (-x).exp()
    } else {
        x.exp().ln_1p()
    }
}
