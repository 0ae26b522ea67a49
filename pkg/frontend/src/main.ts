import { SearchApp } from "./app.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("service") ?? "http://127.0.0.1:8080";

new SearchApp(document.getElementById("app")!, { baseUrl });
