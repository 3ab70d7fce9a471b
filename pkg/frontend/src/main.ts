/* Bundle entry point: boot against the live document. */
import { boot } from "./boot";

boot(window);
