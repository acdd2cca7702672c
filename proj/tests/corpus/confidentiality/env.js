const apiToken = process.env.API_TOKEN;
const port = process.env.PORT || 3000;

console.log(`listening on ${port}`);
console.debug('token', apiToken);

// expect: LoggedVar API_TOKEN 1 - Logging 5
// expect: LoggedVar PORT 2 - Logging 4
// expect: LoggedVar port 4 - Logging 4
// expect: LoggedVar apiToken 5 - Logging 5
