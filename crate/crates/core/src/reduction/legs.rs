//! Connector legs: detours that leave a horizontal strand of a variable
//! block, climb to the clause's level and come back to the strand.
//!
//! Coordinates here are in the design frame of a clause above the variable
//! line. Legs of clauses below the line are drawn with the turtle mirrored,
//! which keeps east and west and swaps up and down.

use crate::gadgets::program::Turtle;
use crate::gadgets::GadgetError;
use crate::hexlattice::Direction;

use Direction as D;

/// Straight run of a climbing strand (heading NE). With `invert`, two
/// switches near the bottom move everything above them two steps west
/// when the key is on.
fn up_strand(t: &mut Turtle, count: i64, invert: Option<&str>) -> Result<(), GadgetError> {
    match invert {
        Some(key) => {
            if count < 7 {
                return Err(GadgetError::Capacity(format!("strand of {count} nodes cannot invert")));
            }
            t.trace("ss");
            t.shift(key, false)?;
            t.shift(key, false)?;
            t.trace(&"s".repeat(count as usize - 6));
        }
        None => {
            t.trace(&"s".repeat(count as usize));
        }
    }
    Ok(())
}

/// Straight run of a descending strand (heading SW); undoes the shift of
/// [`up_strand`].
fn down_strand(t: &mut Turtle, count: i64, invert: Option<&str>) -> Result<(), GadgetError> {
    match invert {
        Some(key) => {
            if count < 7 {
                return Err(GadgetError::Capacity(format!("strand of {count} nodes cannot invert")));
            }
            t.trace("ss");
            t.shift(key, true)?;
            t.shift(key, true)?;
            t.trace(&"s".repeat(count as usize - 6));
        }
        None => {
            t.trace(&"s".repeat(count as usize));
        }
    }
    Ok(())
}

/// Smallest hub height the legs support.
pub const MIN_HEIGHT: i64 = 18;

/// Leg of the middle literal. Its tip node ends two rows below and two
/// columns left of the hub; the hub sits `height` rows above the strand.
pub fn middle(t: &mut Turtle, height: i64, invert: Option<&str>) -> Result<(), GadgetError> {
    t.trace("l");
    up_strand(t, height - 10, invert)?;
    t.node(Some(D::NE), &[D::E]);
    t.builder.role("clause");
    for _ in 0..5 {
        t.node(Some(D::NE), &[D::W]);
    }
    t.node(Some(D::NE), &[D::NW]);
    t.node(Some(D::SE), &[D::NE, D::NW]);
    t.node(Some(D::SW), &[D::SE, D::E]);
    t.node(Some(D::SW), &[D::SE]);
    t.node(Some(D::SE), &[]);
    t.node(Some(D::SW), &[D::E, D::SE]);
    t.node(Some(D::SE), &[]);
    t.node(Some(D::SW), &[D::E, D::SE]);
    t.builder.role("connector");
    down_strand(t, height - 10, invert)?;
    t.trace("ll");
    Ok(())
}

/// Leg of the left literal: climbs, runs east in a two-row arm of `arm`
/// top nodes, and ends in the bulge whose tip sits one row above the hub
/// row, `height + 2 * arm + 7` columns right of the leg's base.
pub fn left(t: &mut Turtle, height: i64, arm: i64, invert: Option<&str>) -> Result<(), GadgetError> {
    if arm < 2 {
        return Err(GadgetError::Capacity(format!("left arm of {arm} nodes is too short")));
    }
    t.trace("l");
    up_strand(t, height, invert)?;
    t.trace("r");
    for _ in 0..arm {
        t.node(Some(D::E), &[D::NE]);
    }
    t.builder.role("clause");
    t.node(Some(D::E), &[]);
    t.node(Some(D::E), &[D::NE, D::NW]);
    t.node(Some(D::SW), &[D::SE, D::E, D::NE]);
    t.node(Some(D::W), &[]);
    t.builder.role("connector");
    for _ in 0..arm - 1 {
        t.node(Some(D::W), &[D::SW]);
    }
    t.node(Some(D::SW), &[D::W]);
    down_strand(t, height - 2, invert)?;
    t.trace("ll");
    Ok(())
}

/// Leg of the right literal. It climbs to one row below the hub, runs west
/// in the lower arm row to the notched hub node, and returns east in the
/// upper row. `hub` is the hub's column relative to the leg's base
/// (negative); `keys` select the hub's free leaf among NW, W, SW.
pub fn right(
    t: &mut Turtle,
    height: i64,
    hub: i64,
    invert: Option<&str>,
    keys: [&str; 2],
) -> Result<(), GadgetError> {
    let lower = (height - hub - 4) / 2;
    let upper = (height - hub) / 2 + 1;
    if lower < 3 {
        return Err(GadgetError::Capacity(format!("right arm of {lower} nodes is too short")));
    }
    t.trace("l");
    up_strand(t, height - 3, invert)?;
    t.node(Some(D::NE), &[D::E]);
    t.node(Some(D::W), &[D::E]);
    t.node(Some(D::W), &[]);
    t.node(Some(D::W), &[]);
    for _ in 2..lower {
        t.node(Some(D::W), &[D::SE]);
    }
    t.builder.role("clause");
    t.node(Some(D::NW), &[D::SW, D::SE]);
    t.select(D::NE, &[], &keys, &[D::NW, D::W, D::SW])?;
    t.node(Some(D::E), &[D::NW]);
    t.builder.role("connector");
    for _ in 0..upper {
        t.node(Some(D::E), &[D::NW, D::SW]);
    }
    t.trace("rr");
    down_strand(t, height - 2, invert)?;
    t.trace("ll");
    Ok(())
}
