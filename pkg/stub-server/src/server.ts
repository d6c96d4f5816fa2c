import { buildApp } from "./app";

function parsePort(argv: string[]): number {
  const idx = argv.indexOf("--port");
  if (idx >= 0 && argv[idx + 1] !== undefined) {
    const port = Number(argv[idx + 1]);
    if (!Number.isInteger(port) || port < 0 || port > 65535) {
      console.error(`bad --port value: ${argv[idx + 1]}`);
      process.exit(1);
    }
    return port;
  }
  return 8760;
}

const port = parsePort(process.argv.slice(2));
const app = buildApp();
const server = app.listen(port, () => {
  const addr = server.address();
  const bound = typeof addr === "object" && addr ? addr.port : port;
  console.log(`stub generation server listening on :${bound}`);
});

process.on("SIGTERM", () => server.close(() => process.exit(0)));
process.on("SIGINT", () => server.close(() => process.exit(0)));
