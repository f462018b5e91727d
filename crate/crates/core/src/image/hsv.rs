use serde::{Deserialize, Serialize};

/// Hue in degrees `[0, 360)`, saturation and value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hsv {
    pub h: f64,
    pub s: f64,
    pub v: f64,
}

/// Hexcone conversion of 8-bit RGB. Hue is 0 for achromatic pixels.
pub fn rgb_to_hsv(r: u8, g: u8, b: u8) -> Hsv {
    let (rf, gf, bf) = (f64::from(r), f64::from(g), f64::from(b));
    let max = rf.max(gf).max(bf);
    let min = rf.min(gf).min(bf);
    let delta = max - min;
    let v = max / 255.0;
    let s = if max == 0.0 { 0.0 } else { delta / max };
    let h = if delta == 0.0 {
        0.0
    } else if max == rf {
        let h = 60.0 * ((gf - bf) / delta);
        if h < 0.0 {
            h + 360.0
        } else {
            h
        }
    } else if max == gf {
        60.0 * ((bf - rf) / delta + 2.0)
    } else {
        60.0 * ((rf - gf) / delta + 4.0)
    };
    Hsv { h, s, v }
}

/// Inverse of [`rgb_to_hsv`], rounded to the nearest 8-bit channel value.
pub fn hsv_to_rgb(hsv: Hsv) -> (u8, u8, u8) {
    let Hsv { h, s, v } = hsv;
    let c = v * s;
    let hp = h.rem_euclid(360.0) / 60.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r1, g1, b1) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    let to8 = |f: f64| ((f + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    (to8(r1), to8(g1), to8(b1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(rgb_to_hsv(0, 0, 0), Hsv { h: 0.0, s: 0.0, v: 0.0 });
        assert_eq!(rgb_to_hsv(255, 0, 0), Hsv { h: 0.0, s: 1.0, v: 1.0 });
        let gray = rgb_to_hsv(128, 128, 128);
        assert_eq!((gray.h, gray.s), (0.0, 0.0));
        assert!((gray.v - 0.5020).abs() < 5e-5);
        assert_eq!(rgb_to_hsv(0, 255, 0).h, 120.0);
        assert_eq!(rgb_to_hsv(0, 0, 255).h, 240.0);
        assert_eq!(rgb_to_hsv(255, 0, 255).h, 300.0);
    }

    #[test]
    fn hue_stays_below_360() {
        let h = rgb_to_hsv(255, 0, 1).h;
        assert!(h < 360.0 && h > 359.0, "{h}");
    }

    #[test]
    fn round_trip_sample() {
        for (r, g, b) in [(12, 200, 77), (255, 255, 255), (1, 2, 3), (250, 10, 128)] {
            let (r2, g2, b2) = hsv_to_rgb(rgb_to_hsv(r, g, b));
            assert!(r.abs_diff(r2) <= 1 && g.abs_diff(g2) <= 1 && b.abs_diff(b2) <= 1);
        }
    }
}
