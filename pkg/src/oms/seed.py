"""Demo dataset: a small cleaning firm one week into operation.

Seeds every role with a known password, a product and a service catalog with
dated menus, supplier contracts and stock, shifts, one promotion, and the
stakeholder table used by the community analytics demo. Deterministic, so
demos and the frontend test-drive always start from the same world.
"""

from __future__ import annotations

from datetime import timedelta

from .accounts import _hash_password  # seed shortcuts activation on purpose
from .app import Application
from .store import Transaction

DEMO_PASSWORD = "demo-pass-1"


def seed_demo(app: Application) -> dict:
    today = app.clock.today()
    dates = [(today + timedelta(days=offset)).isoformat() for offset in range(0, 8)]

    director = app.store.run(lambda txn: _employee(app, txn, "Diana", "Prince",
                                                   "director", "management", "00001"))
    admin = app.store.run(lambda txn: _employee(app, txn, "Sam", "Okafor",
                                                "administrator", "it", "00002"))
    supervisor = app.store.run(lambda txn: _employee(app, txn, "Lena", "Hart",
                                                     "supervisor", "operations", "00003"))
    staff = [app.store.run(lambda txn, n=n: _employee(app, txn, n[0], n[1],
                                                      "cleaning_staff", "operations", n[2]))
             for n in (("Ana", "Silva", "00011"), ("Ben", "Cole", "00012"),
                       ("Cara", "Young", "00013"))]
    customer = app.store.run(lambda txn: _customer(app, txn, "pat@example.net"))
    suppliers = [app.store.run(lambda txn, s=s: _supplier(app, txn, s))
                 for s in ("brightsupply", "cleanchem")]

    def contracts(txn: Transaction):
        txn.put("contract:brightsupply", {"supplier_id": "brightsupply", "flat_fee": 250})
        txn.put("contract:cleanchem", {"supplier_id": "cleanchem", "flat_fee": 400})
    app.store.run(contracts)

    products = [
        ("mop-heads", "Mop heads (10 pack)", 500, "brightsupply", 40),
        ("floor-soap", "Floor soap 5L", 300, "brightsupply", 60),
        ("glass-spray", "Glass spray", 250, "cleanchem", 30),
        ("heavy-degreaser", "Heavy degreaser 5L", 999, "cleanchem", 12),
    ]
    for item_id, name, price, supplier, stock in products:
        app.catalog.upsert_item(audience="products", item_id=item_id, name=name,
                                unit_price=price, supplier_id=supplier)
        app.supplier_endpoint.set_stock(supplier, item_id, stock * 10)
        app.fieldops.set_stock(item_id=item_id, standing=stock, capacity=stock,
                               unit_cost=price, supplier_id=supplier)

    services = [
        ("regular-clean", "Regular clean", 1500, 100),
        ("deep-clean", "Deep clean", 3500, 150),
        ("window-clean", "Window cleaning", 1200, 75),
        ("carpet-wash", "Carpet wash", 2800, 125),
    ]
    for item_id, name, price, factor in services:
        app.catalog.upsert_item(audience="services", item_id=item_id, name=name,
                                unit_price=price, hours_factor_pct=factor)

    supplier_accounts = {s["username"]: s for s in suppliers}
    for date in dates:
        app.catalog.create_menu(
            supplier_accounts["brightsupply"], audience="products", date=date,
            entries=[{"item_id": i, "name": n, "unit_price": p, "supplier_id": s,
                      "available_units": u}
                     for i, n, p, s, u in products])
        app.catalog.create_menu(
            director, audience="services", date=date,
            entries=[{"item_id": i, "name": n, "unit_price": p,
                      "available_units": 99, "hours_factor_pct": f}
                     for i, n, p, f in services])
        app.scheduling.ensure_slots(date)

    for date in dates:
        app.scheduling.create_shift(date=date, start="08:00", end="16:00",
                                    staff=[s["id"] for s in staff[:2]],
                                    supervisor_id=supervisor["id"])
        app.scheduling.create_shift(date=date, start="12:00", end="20:00",
                                    staff=[staff[2]["id"]],
                                    supervisor_id=supervisor["id"])

    app.catalog.define_promotion(
        supplier_accounts["cleanchem"], name="Spring shine", start=dates[0],
        end=dates[7], item_prices=[{"item_id": "glass-spray", "promo_price": 199}])

    return {
        "director": director, "administrator": admin, "supervisor": supervisor,
        "staff": staff, "customer": customer, "suppliers": suppliers,
        "password": DEMO_PASSWORD, "dates": dates,
    }


def _account_base(app: Application, txn: Transaction, *, username: str, role: str,
                  email: str, names: dict, department: str, recruitment_no: str) -> dict:
    account_id = txn.next_seq("account")
    salt = "00" * 16
    record = {
        "id": account_id, "username": username, "role": role, "state": "active",
        "suspension": None, "email": email, "names": names,
        "department": department, "recruitment_no": recruitment_no,
        "payment_details": None, "password_salt": salt,
        "password_iterations": app.config.pbkdf2_iterations,
        "password_hash": _hash_password(DEMO_PASSWORD, salt,
                                        app.config.pbkdf2_iterations),
        "password_set_at": app.clock.now().isoformat(),
        "must_change_password": False, "failed_attempts": 0, "locked": False,
        "created_at": app.clock.now().isoformat(),
    }
    txn.put(f"account:{account_id}", record)
    txn.put(f"username:{username}", {"account_id": account_id})
    return record


def _employee(app: Application, txn: Transaction, first: str, last: str,
              role: str, department: str, recruitment_no: str) -> dict:
    username = (first[0] + last).lower()
    return _account_base(app, txn, username=username, role=role,
                         email=f"{username}@example.net",
                         names={"first_name": first, "surname": last},
                         department=department, recruitment_no=recruitment_no)


def _customer(app: Application, txn: Transaction, email: str) -> dict:
    return _account_base(app, txn, username=email, role="customer", email=email,
                         names={}, department="", recruitment_no="")


def _supplier(app: Application, txn: Transaction, name: str) -> dict:
    return _account_base(app, txn, username=name, role="supplier",
                         email=f"orders@{name}.example.net", names={},
                         department="", recruitment_no="")


def firm_stakeholders() -> list[dict]:
    """The firm's community: who needs which information flows and who
    produces them (customers split by usage state)."""
    return [
        {"name": "directors", "base_states": ["online", "stationary"],
         "needs": ["financial-data", "operational-details", "sales-information",
                   "supplier-information", "market-data", "hr-information"],
         "outputs": ["customer-greetings", "service-updates", "general-thanks",
                     "resource-tags"]},
        {"name": "cleaning-staff", "base_states": ["online", "mobile"],
         "needs": ["job-rotors", "impromptu-announcements"],
         "outputs": ["complaints", "suggestions", "peer-nominations",
                     "resource-tags", "marketing-recommendations"]},
        {"name": "supervisors", "base_states": ["online"],
         "needs": ["scheduling-functions", "job-rotors"],
         "outputs": ["employee-ratings", "memos", "general-thanks"]},
        {"name": "customers-onsite", "base_states": ["online", "stationary"],
         "needs": ["service-descriptions", "price-information",
                   "company-information", "contact-details", "help-manuals"],
         "outputs": ["service-ratings", "complaints", "marketing-recommendations",
                     "resource-tags", "enquiries", "orders", "cancellations"]},
        {"name": "customers-offsite", "base_states": ["online"],
         "needs": ["reviews", "advertisements"],
         "outputs": ["comments", "reviews", "advertisements"]},
        {"name": "customers-mobile", "base_states": ["mobile"],
         "needs": ["job-status", "job-bookings"],
         "outputs": ["orders", "cancellations"]},
        {"name": "suppliers", "base_states": ["online"],
         "needs": ["current-inventory-levels", "order-information"],
         "outputs": ["stock-levels", "new-products", "ongoing-promotions",
                     "price-information"]},
        {"name": "administrator", "base_states": ["online", "stationary"],
         "needs": ["system-usage-statistics", "system-configurations"],
         "outputs": ["system-configurations", "help-manuals"]},
        {"name": "management-system", "base_states": ["online"],
         "needs": ["orders", "cancellations", "service-ratings", "stock-levels",
                   "employee-ratings", "system-configurations", "enquiries",
                   "complaints"],
         "outputs": ["job-rotors", "job-status", "job-bookings", "financial-data",
                     "operational-details", "sales-information",
                     "supplier-information", "hr-information", "order-information",
                     "current-inventory-levels", "scheduling-functions",
                     "service-descriptions", "company-information",
                     "contact-details", "impromptu-announcements",
                     "system-usage-statistics", "market-data", "reviews"]},
    ]
