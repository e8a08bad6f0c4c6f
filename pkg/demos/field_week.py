"""A working week for the field side of the house.

Supervisor fills the sheets after each shift (wages computed, stock drawn
down, the replenishment event firing exactly once), the customer rates the
finished job, a low score goes through appeal, and the director closes the
week with the reports.

    python demos/field_week.py
"""

from datetime import timedelta

from oms import Application, AppConfig
from oms.clock import ManualClock
from oms.seed import seed_demo


def main():
    clock = ManualClock()
    app = Application(AppConfig(pbkdf2_iterations=1_000), clock=clock)
    world = seed_demo(app)
    director, supervisor, customer = (world["director"], world["supervisor"],
                                      world["customer"])
    monday = world["dates"][0]

    job = app.ordering.place_service_order(
        customer, services=["regular-clean"], date=monday, time="10:00",
        location="4 Garden Square",
        premises={"square_feet": 900, "rooms": 4, "floors": 1,
                  "surface_kind": "carpet", "area_kind": "room"},
        payment_method="card")
    print(f"job #{job['id']} booked for {monday}")

    clock.advance(timedelta(hours=9))  # the shift has ended
    shift = app.scheduling.shifts_for_date(monday)[0]

    print("\n== attendance -> wages ==")
    result = app.fieldops.populate_attendance(
        supervisor, shift["id"],
        [{"employee_id": employee_id, "reporting_time": "08:00",
          "finishing_time": "16:00"} for employee_id in shift["staff"]])
    for wage in result["wages"]:
        print(f"  employee {wage['employee_id']}: {wage['minutes']}min "
              f"-> {wage['wage']}p")

    print("\n== inventory -> usage, cost, replenishment ==")
    sheet = app.fieldops.populate_inventory(
        supervisor, shift["id"],
        [{"item_id": "heavy-degreaser", "issued": 8, "returned": 1}])
    line = sheet["sheet"]["lines"][0]
    print(f"  used {line['used']}, standing {line['standing']}, "
          f"reorder fired: {line['reorder_fired']}")
    print("  replenishment requests:", app.ordering.process_reorder_events())

    print("\n== rating, appeal, resolution ==")
    app.ordering.set_status(director, f"service:{job['id']}", "completed")
    rating = app.ratings.rate_job(customer, job["id"],
                                  [{"criterion": "punctuality", "score": 2},
                                   {"criterion": "finish", "score": 3}])
    print(f"  customer scored the job {rating['score']} (itemized kept)")
    staff_member = {"id": shift["staff"][0],
                    **app.accounts.get_account(shift["staff"][0])}
    appeal = app.ratings.appeal_rating(staff_member, rating["id"],
                                       "the brief changed on site")
    resolved = app.ratings.resolve_appeal(director, appeal["id"],
                                          decision="revised", new_score=4)
    print(f"  appeal {resolved['resolution']}, new score {resolved['new_score']}")

    period = {"start": world["dates"][0], "end": world["dates"][7]}
    print("  ranking:", app.ratings.rank_employees(period))

    print("\n== the week on paper ==")
    month = monday[:7]
    cash = app.reporting.cash_flow(director, month)
    print("  cash flow rows:", cash["body"]["rows"])
    print("  productivity:",
          app.reporting.productivity_report(
              director, f"{monday[:4]}-W{clock.today().isocalendar()[1]:02d}"
          )["body"]["rows"])
    export = app.reporting.export(director, cash["id"], format="csv")
    print("  csv export:\n" + "\n".join(
        "    " + line for line in export["content"].strip().splitlines()))


if __name__ == "__main__":
    main()
