#pragma once

namespace stregion::geometry {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// Sign of the signed area of (a, b, c): +1 counter-clockwise, -1 clockwise,
/// 0 collinear. Exact for all finite inputs (floating filter with a rational
/// fallback).
int orient2d(Point2 a, Point2 b, Point2 c);

/// +1 when d lies strictly inside the circle through a, b, c (given in
/// counter-clockwise order), -1 outside, 0 on the circle. Exact.
int incircle(Point2 a, Point2 b, Point2 c, Point2 d);

} // namespace stregion::geometry
