"""A day of trading, end to end.

Walks the two ordering flows against an in-memory application: the director
restocks cleaning products (delivery slot, supplier emails, the works) and a
customer books a one-off clean that the scheduler has to fit onto a shift.
Run it directly:

    python demos/ordering_day.py
"""

from oms import Application, AppConfig
from oms.seed import seed_demo


def main():
    app = Application(AppConfig(pbkdf2_iterations=1_000))
    world = seed_demo(app)
    director, customer = world["director"], world["customer"]
    tomorrow = world["dates"][1]

    print("== product restock (director -> suppliers) ==")
    quote = app.ordering.quote_product_order(
        lines=[{"item_id": "mop-heads", "qty": 2}, {"item_id": "glass-spray", "qty": 3}],
        date=tomorrow, delivery={"mode": "delivery"})
    print("quoted:", quote.to_record())

    order = app.ordering.place_product_order(
        director,
        lines=[{"item_id": "mop-heads", "qty": 2}, {"item_id": "glass-spray", "qty": 3}],
        date=tomorrow,
        delivery={"mode": "delivery", "slot": "09:00", "location": "12 Depot Way"},
        payment_method="card")
    print(f"order #{order['id']} stored as {order['status']}, "
          f"total {order['breakdown']['total']}p "
          f"(glass-spray billed at the promotion price)")
    print("queued mail:", [(m["template"], m["recipient"])
                           for m in app.outbox.messages("queued")])

    print("\n== one-off service (customer -> company) ==")
    request = dict(services=["regular-clean", "window-clean"], date=tomorrow,
                   time="10:00", location="4 Garden Square",
                   premises={"square_feet": 1200, "rooms": 5, "floors": 2,
                             "surface_kind": "carpet", "area_kind": "room"},
                   payment_method="card")
    job = app.ordering.place_service_order(customer, **request)
    print(f"job #{job['id']} pending, labor minutes reserved, "
          f"total {job['breakdown']['total']}p")

    print("\n== too big a job proposes a scale-down ==")
    oversized = app.ordering.place_service_order(
        customer, services=["deep-clean"] * 8, date=tomorrow, time="10:00",
        location="4 Garden Square",
        premises={"square_feet": 5000, "rooms": 20, "floors": 3,
                  "surface_kind": "carpet", "area_kind": "hall"},
        payment_method="card")
    print("proposal:", oversized["scale_down"])

    print("\n== delivery emails actually go out ==")
    print("drain:", app.deliver_outbox())
    print("sent:", [(m["template"], m["recipient"]) for m in app.transport.sent])


if __name__ == "__main__":
    main()
