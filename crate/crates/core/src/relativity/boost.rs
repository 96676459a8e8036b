use serde::{Deserialize, Serialize};

use crate::lattice::Event;
use crate::{Error, Result};

/// Lorentz boost along the chain with the sound speed `c_s` in place of `c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SoundBoost {
    velocity: f64,
    sound_speed: f64,
}

impl SoundBoost {
    pub fn new(velocity: f64, sound_speed: f64) -> Result<Self> {
        if !(sound_speed > 0.0 && sound_speed.is_finite()) {
            return Err(Error::invalid(format!("sound speed must be positive, got {sound_speed}")));
        }
        if !(velocity.abs() < sound_speed) {
            return Err(Error::invalid(format!("boost velocity {velocity} must be below the sound speed {sound_speed}")));
        }
        Ok(SoundBoost { velocity, sound_speed })
    }

    pub fn identity(sound_speed: f64) -> Result<Self> {
        SoundBoost::new(0.0, sound_speed)
    }

    pub fn velocity(&self) -> f64 {
        self.velocity
    }

    pub fn sound_speed(&self) -> f64 {
        self.sound_speed
    }

    pub fn beta(&self) -> f64 {
        self.velocity / self.sound_speed
    }

    pub fn gamma(&self) -> f64 {
        1.0 / (1.0 - self.beta().powi(2)).sqrt()
    }

    /// Coordinates of `e` in the moving frame: `x' = γ(x − vt)`, `t' = γ(t − vx/c_s²)`.
    pub fn apply(&self, e: Event) -> Event {
        let (g, v, c2) = (self.gamma(), self.velocity, self.sound_speed.powi(2));
        Event { x: g * (e.x - v * e.t), t: g * (e.t - v * e.x / c2) }
    }

    pub fn inverse(&self) -> SoundBoost {
        SoundBoost { velocity: -self.velocity, sound_speed: self.sound_speed }
    }

    /// `other ∘ self`: apply `self`, then `other`. Velocities add as
    /// `(u + v)/(1 + uv/c_s²)`.
    pub fn compose(&self, other: &SoundBoost) -> Result<SoundBoost> {
        if (self.sound_speed - other.sound_speed).abs() > 1e-12 * self.sound_speed {
            return Err(Error::invalid("cannot compose boosts with different sound speeds"));
        }
        let c2 = self.sound_speed.powi(2);
        let v = (self.velocity + other.velocity) / (1.0 + self.velocity * other.velocity / c2);
        SoundBoost::new(v, self.sound_speed)
    }
}
