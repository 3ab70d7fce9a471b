#!/usr/bin/env python3
"""Demo chart renderer speaking the graphic-script protocol.

Reads one JSON object on stdin:
    {"parameters": {...}, "output": "path.png", "width": W, "height": H}
and writes a PNG. Pure stdlib so the demo has no dependencies. The image
is a deterministic function of the parameters.
"""
import json
import math
import struct
import sys
import zlib

MARGIN = 40
CAPACITY = 100.0
SPAN_YEARS = 12.0


def png_bytes(width, height, rgb):
    def chunk(tag, data):
        block = tag + data
        return struct.pack(">I", len(data)) + block + struct.pack(">I", zlib.crc32(block))

    raw = b"".join(
        b"\x00" + bytes(rgb[y * width * 3:(y + 1) * width * 3])
        for y in range(height)
    )
    header = struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0)
    return (
        b"\x89PNG\r\n\x1a\n"
        + chunk(b"IHDR", header)
        + chunk(b"IDAT", zlib.compress(raw, 6))
        + chunk(b"IEND", b"")
    )


class Canvas:
    def __init__(self, width, height):
        self.width = width
        self.height = height
        self.rgb = bytearray([250] * (width * height * 3))

    def put(self, x, y, color):
        if 0 <= x < self.width and 0 <= y < self.height:
            i = (y * self.width + x) * 3
            self.rgb[i:i + 3] = bytes(color)

    def dot(self, x, y, color, radius=2):
        for dy in range(-radius, radius + 1):
            for dx in range(-radius, radius + 1):
                if dx * dx + dy * dy <= radius * radius:
                    self.put(x + dx, y + dy, color)

    def vline(self, x, y0, y1, color):
        for y in range(min(y0, y1), max(y0, y1) + 1):
            self.put(x, y, color)

    def hline(self, y, x0, x1, color, dash=0):
        for x in range(min(x0, x1), max(x0, x1) + 1):
            if dash and (x // dash) % 2:
                continue
            self.put(x, y, color)


def logistic(t, rate):
    return CAPACITY / (1.0 + 19.0 * math.exp(-rate * t))


def noise(t, rate):
    # deterministic seasonal wobble plus a fitted-rate-dependent drift
    return 6.0 * math.sin(2.4 * t) + 2.0 * math.cos(0.9 * t * (1.0 + rate))


def x_px(canvas, t):
    usable = canvas.width - 2 * MARGIN
    return MARGIN + int(usable * t / SPAN_YEARS)


def y_px(canvas, value, lo, hi):
    usable = canvas.height - 2 * MARGIN
    frac = (value - lo) / (hi - lo)
    return canvas.height - MARGIN - int(usable * max(0.0, min(1.0, frac)))


def draw_axes(canvas):
    axis = (120, 120, 120)
    canvas.hline(canvas.height - MARGIN, MARGIN, canvas.width - MARGIN, axis)
    canvas.vline(MARGIN, MARGIN, canvas.height - MARGIN, axis)


def draw_growth(canvas, rate, show_carrying):
    draw_axes(canvas)
    lo, hi = 0.0, CAPACITY * 1.15
    if show_carrying:
        y = y_px(canvas, CAPACITY, lo, hi)
        canvas.hline(y, MARGIN, canvas.width - MARGIN, (200, 80, 80), dash=6)
    curve = (30, 90, 200)
    steps = canvas.width - 2 * MARGIN
    prev = None
    for i in range(steps + 1):
        t = SPAN_YEARS * i / steps
        x = x_px(canvas, t)
        y = y_px(canvas, logistic(t, rate), lo, hi)
        if prev is not None:
            canvas.vline(x, prev, y, curve)
        prev = y
    for k in range(0, 25):
        t = SPAN_YEARS * k / 24.0
        observed = logistic(t, 0.7) + noise(t, 0.7)
        canvas.dot(x_px(canvas, t), y_px(canvas, observed, lo, hi), (60, 60, 60))


def draw_residuals(canvas, rate, smoothed):
    draw_axes(canvas)
    lo, hi = -25.0, 25.0
    canvas.hline(y_px(canvas, 0.0, lo, hi), MARGIN, canvas.width - MARGIN,
                 (170, 170, 170), dash=4)
    samples = []
    for k in range(0, 49):
        t = SPAN_YEARS * k / 48.0
        observed = logistic(t, 0.7) + noise(t, 0.7)
        samples.append((t, observed - logistic(t, rate)))
    if smoothed:
        window = 5
        values = [r for _, r in samples]
        smooth = []
        for i, (t, _) in enumerate(samples):
            left = max(0, i - window // 2)
            right = min(len(values), i + window // 2 + 1)
            smooth.append((t, sum(values[left:right]) / (right - left)))
        samples = smooth
        color = (160, 60, 170)
    else:
        color = (220, 130, 40)
    for t, r in samples:
        canvas.dot(x_px(canvas, t), y_px(canvas, r, lo, hi), color)


def main():
    request = json.loads(sys.stdin.read())
    params = request["parameters"]
    canvas = Canvas(int(request["width"]), int(request["height"]))
    rate = float(params.get("rate", 0.5))
    if "showCarrying" in params:
        draw_growth(canvas, rate, bool(params.get("showCarrying")))
    else:
        draw_residuals(canvas, rate, bool(params.get("smoothed")))
    with open(request["output"], "wb") as handle:
        handle.write(png_bytes(canvas.width, canvas.height, canvas.rgb))


if __name__ == "__main__":
    main()
