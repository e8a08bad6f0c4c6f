"""The management feedback loop in action.

Demand for quality moves; the organization reviews the measured gap on a
cadence and corrects proportionally. The demo shows the three regimes the
gain can put you in, what a dead zone does, and how measurement noise shows
up in the loop's accuracy metric.

    python demos/management_loop.py
"""

from oms.analytics import LoopParams, TimeSeries, quality_gap, simulate_loop


def show(label, trace, steps=8):
    gaps = trace.gaps_after_reviews()[:steps]
    print(f"{label:<30} gap after each review: "
          + "  ".join(f"{g:8.2f}" for g in gaps))
    print(f"{'':<30} regime={trace.classify_regime()}  "
          f"frequency={trace.frequency:.2f}/step  accuracy={trace.accuracy:.3f}")


def main():
    print("== pointwise quality gap ==")
    delivered = TimeSeries((2004, 2005, 2006), (400.0, 500.0, 600.0))
    demanded = TimeSeries((2004, 2005, 2006), (509.0, 630.0, 750.0))
    gap = quality_gap(delivered, demanded)
    print("demand minus delivery:", dict(zip(gap.times, gap.values)),
          "(positive = the market expects more than we deliver)\n")

    print("== constant demand 100, starting offer 0 ==")
    for gain in (0.5, 1.0, 1.5, 2.0, 2.5):
        show(f"gain {gain}", simulate_loop(100.0, 0.0, LoopParams(gain=gain),
                                           horizon=8))
    print()

    print("== review cadence and dead zone ==")
    show("review every 3 steps",
         simulate_loop(100.0, 0.0, LoopParams(gain=1.0, review_period=3), horizon=9))
    show("dead zone 10 on a gap of 5",
         simulate_loop(5.0, 0.0, LoopParams(gain=1.0, sensitivity=10.0), horizon=9))
    print()

    print("== noisy measurements degrade accuracy ==")
    show("sigma 5, seeded",
         simulate_loop(100.0, 0.0,
                       LoopParams(gain=0.5, noise_sigma=5.0, seed=7), horizon=12))


if __name__ == "__main__":
    main()
