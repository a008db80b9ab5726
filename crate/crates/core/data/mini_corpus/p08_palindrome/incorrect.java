import java.util.Scanner;

public class Main {
    public static void main(String[] args) {
        Scanner sc = new Scanner(System.in);
        String s = sc.next();
        String rev = new StringBuilder(s).reverse().toString();
        // same length and same first letter
        boolean ok = s.length() == rev.length() && s.charAt(0) == rev.charAt(0);
        System.out.println(ok ? "Yes" : "No");
    }
}
