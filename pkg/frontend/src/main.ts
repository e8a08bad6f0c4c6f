import { OmsApi } from "./api.js";
import { startApp } from "./app.js";

const base = (window as { OMS_API_BASE?: string }).OMS_API_BASE
  ?? "http://127.0.0.1:8000";
startApp(document.getElementById("app")!, new OmsApi(base));
